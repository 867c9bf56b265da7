#pragma once

// Prime-ideal norm stream.  One event per rational prime p with p^f <= x,
// aggregating the g ideals above p into a single (norm, multiplicity) pair;
// the two global sums
//
//   theta_K(x)  = sum_{Np <= x} log Np                  ~  x
//   sum_{Np <= x} sum_{Np' = Np} (log Np)^2             ~  [K:Q](x log x - x)
//
// are one-pass folds over the stream (equal norms only occur above a common
// rational prime, so the second sum is sum_p g^2 (f log p)^2).

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "bdhvar/field.hpp"
#include "bdhvar/numeric.hpp"
#include "bdhvar/primes.hpp"

namespace bdhvar {

struct NormEvent {
    u64 p = 0;
    u64 norm = 0;
    int multiplicity = 1;   // g_p
    double log_norm = 0.0;  // f_p * log p
};

namespace detail {
// norm = p^f if it stays <= x, else nullopt.
inline std::optional<u64> bounded_power(u64 p, int f, u64 x) {
    u64 n = 1;
    for (int i = 0; i < f; ++i) {
        if (n > x / p) return std::nullopt;
        n *= p;
    }
    if (n > x) return std::nullopt;
    return n;
}
}  // namespace detail

// Emits one NormEvent per rational prime p in [lo, hi] whose ideal norm p^f
// is <= x, in increasing order of p.  Generic-galois ramified primes without
// a table entry are skipped (finitely many; O(log^2 x) in every sum here).
template <typename Emit>
void enumerate_norms_in(const FieldSpec& F, u64 lo, u64 hi, u64 x, Emit&& emit) {
    for_each_prime_in(lo, hi, [&](u64 p) {
        SplittingDatum s = splitting(F, p);
        if (!s.known) return;
        auto norm = detail::bounded_power(p, s.f, x);
        if (!norm) return;
        emit(NormEvent{p, *norm, s.g, s.f * std::log(static_cast<double>(p))});
    });
}

template <typename Emit>
void enumerate_norms(const FieldSpec& F, u64 x, Emit&& emit) {
    if (x < 2) throw std::invalid_argument("enumerate_norms: x >= 2 required");
    enumerate_norms_in(F, 2, x, x, emit);
}

inline std::vector<NormEvent> norm_events(const FieldSpec& F, u64 x) {
    std::vector<NormEvent> ev;
    enumerate_norms(F, x, [&](const NormEvent& e) { ev.push_back(e); });
    return ev;
}

// theta_K(x) = sum multiplicity * log_norm over the stream.
inline double theta_total(const FieldSpec& F, u64 x, int threads = 1) {
    if (x < 2) return 0.0;
    if (threads <= 1) {
        CompensatedSum acc;
        enumerate_norms(F, x, [&](const NormEvent& e) { acc.add(e.multiplicity * e.log_norm); });
        return acc.value();
    }
    std::vector<double> part(threads, 0.0);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        u64 lo = 2 + (x - 1) * t / threads;
        u64 hi = 1 + (x - 1) * (t + 1) / threads;
        pool.emplace_back([&, t, lo, hi] {
            CompensatedSum acc;
            enumerate_norms_in(F, lo, hi, x, [&](const NormEvent& e) { acc.add(e.multiplicity * e.log_norm); });
            part[t] = acc.value();
        });
    }
    for (auto& th : pool) th.join();
    CompensatedSum total;
    for (double v : part) total.add(v);
    return total.value();
}

// sum_{Np <= x} sum_{Np' = Np} (log Np)^2 = sum_p g^2 (f log p)^2.
inline double equal_norm_square_sum(const FieldSpec& F, u64 x) {
    if (x < 2) return 0.0;
    CompensatedSum acc;
    enumerate_norms(F, x, [&](const NormEvent& e) {
        double m = static_cast<double>(e.multiplicity);
        acc.add(m * m * e.log_norm * e.log_norm);
    });
    return acc.value();
}

}  // namespace bdhvar
