#pragma once

// The variance
//
//   S(x; Q1, Q2) = sum_{Q1 < q <= Q2} sum_{a in G_q}
//                      ( theta_K(x; q, a) - x/phi_K(q) )^2
//
// and its split into equal-norm (H) and distinct-norm (J) pair sums,
// computed by bucketing one shared norm-event array per modulus q.
//
// Per q, with W_r the total log-norm mass in residue class r and mu =
// x/phi_K(q), the class sum over G_q collapses to
//
//   S_q = sum_{r hit} [ (W_r - mu)^2 - mu^2 ] + phi_K(q) mu^2
//
// because every coprime class hit by an event lies in G_q (the norm residue
// is the image of a Frobenius substitution) and unhit classes contribute
// mu^2 each.  Classes with gcd(r, q) > 1 hold at most one event (two events
// congruent mod q sharing a prime divisor with q must coincide), so their
// spurious contribution is removed exactly by a correction indexed on the
// prime divisors of q.  No gcds in the hot loop.
//
// The same bucket pass yields  J_q = sum_r W_r^2 - sum_i w_i^2  and
// H_q = sum_{p not | q} w_i^2, which satisfy sum_a theta^2 = H_q + J_q
// exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bdhvar/dirichlet.hpp"
#include "bdhvar/field.hpp"
#include "bdhvar/galois_image.hpp"
#include "bdhvar/ideal_stream.hpp"
#include "bdhvar/numeric.hpp"

namespace bdhvar {

struct ThetaTable {
    u64 q = 1;
    u64 x = 0;
    // (a, theta_K(x; q, a)) for every a in G_q, ascending in a.
    std::vector<std::pair<u64, double>> values;

    double total() const {
        CompensatedSum s;
        for (auto [a, v] : values) s.add(v);
        return s.value();
    }
};

// Bucket the coprime norm events of one modulus.  Throws if a coprime class
// outside G_q receives mass: that residue would witness a Frobenius image
// outside the group, i.e. a G_q computation bug, never a rounding issue.
inline ThetaTable theta_table(const FieldSpec&, const std::vector<NormEvent>& events,
                              const GqRecord& gq, u64 x) {
    ThetaTable t;
    t.q = gq.q;
    t.x = x;
    const u64 q = gq.q;
    std::vector<double> W(q, 0.0);
    for (const NormEvent& e : events) {
        if (e.norm > x) continue;
        u64 r = e.norm % q;
        if (std::gcd(r == 0 ? q : r, q) != 1) continue;
        if (!gq.contains(r == 0 ? 1 : r))
            throw std::logic_error("theta_table: coprime norm class " + std::to_string(r) +
                                   " outside G_q for q=" + std::to_string(q));
        W[r % q] += e.multiplicity * e.log_norm;
    }
    t.values.reserve(gq.members.size());
    for (u32 a : gq.members) t.values.emplace_back(a, W[a % q]);
    return t;
}

inline ThetaTable theta_table(const FieldSpec& F, u64 x, u64 q) {
    if (q < 1 || x < 2) throw std::invalid_argument("theta_table: q >= 1 and x >= 2 required");
    return theta_table(F, norm_events(F, x), gq_by_generation(F, q), x);
}

namespace detail {

// Scratch for the per-q bucket pass, reused across moduli via epoch tags.
struct BucketScratch {
    std::vector<double> W;
    std::vector<u32> epoch;
    std::vector<u32> touched;
    u32 cur = 0;

    void ensure(u64 qmax) {
        if (W.size() < qmax) {
            W.assign(qmax, 0.0);
            epoch.assign(qmax, 0);
            cur = 0;
        }
    }
};

struct PerQ {
    double S = 0.0;   // sum over a in G_q of (theta - mu)^2
    double Tsq = 0.0; // sum over a in G_q of theta^2
    double H = 0.0;
    double J = 0.0;
};

// One modulus: bucket all events, then assemble the class sums.
inline PerQ scan_one_q(const std::vector<NormEvent>& events, double total_w2,
                       const BaseData& bd, const SpfSieve& spf, u64 x, u64 q,
                       BucketScratch& scr) {
    scr.ensure(q);
    ++scr.cur;
    scr.touched.clear();
    for (const NormEvent& e : events) {
        u64 r = e.norm % q;
        if (scr.epoch[r] != scr.cur) {
            scr.epoch[r] = scr.cur;
            scr.W[r] = 0.0;
            scr.touched.push_back(static_cast<u32>(r));
        }
        scr.W[r] += e.multiplicity * e.log_norm;
    }

    std::vector<std::pair<u64, int>> qf;
    spf.factor(q, qf);
    const double phi_kq = static_cast<double>(phi_k_from_factors(bd, qf));
    const double mu = static_cast<double>(x) / phi_kq;

    PerQ out;
    CompensatedSum S, Tsq, J;
    for (u32 r : scr.touched) {
        double W = scr.W[r];
        S.add((W - mu) * (W - mu) - mu * mu);
        Tsq.add(W * W);
        J.add(W * W);
    }
    // Undo classes owned by events whose prime divides q (at most one event
    // per such class; they are outside every G_q class sum).
    double w2_noncoprime = 0.0;
    for (auto [l, e] : qf) {
        auto it = std::lower_bound(events.begin(), events.end(), l,
                                   [](const NormEvent& ev, u64 p) { return ev.p < p; });
        if (it == events.end() || it->p != l) continue;
        double w = it->multiplicity * it->log_norm;
        S.add(-((w - mu) * (w - mu) - mu * mu));
        Tsq.add(-w * w);
        w2_noncoprime += w * w;
    }
    out.S = S.value() + phi_kq * mu * mu;
    out.Tsq = Tsq.value();
    out.H = total_w2 - w2_noncoprime;
    out.J = J.value() - total_w2;
    return out;
}

struct ScanTotals {
    double S = 0.0, Tsq = 0.0, H = 0.0, J = 0.0;
};

// Shared q-loop over (Q1, Q2].  Contiguous chunks go to worker threads;
// chunk partials are combined in chunk order so results are reproducible to
// compensated-summation accuracy for any thread count, and bitwise stable
// for threads == 1.
inline ScanTotals scan_q_range(const std::vector<NormEvent>& events, const BaseData& bd,
                               u64 x, u64 Q1, u64 Q2, int threads) {
    if (!(Q1 < Q2 && Q2 <= x)) throw std::invalid_argument("variance scan: need 0 <= Q1 < Q2 <= x");
    if (Q2 > 50'000'000) throw std::invalid_argument("variance scan: Q2 beyond the bucket memory cap");
    const SpfSieve spf(Q2);
    double total_w2 = 0.0;
    {
        CompensatedSum s;
        for (const NormEvent& e : events) {
            double w = e.multiplicity * e.log_norm;
            s.add(w * w);
        }
        total_w2 = s.value();
    }

    const u64 count = Q2 - Q1;
    const int T = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    std::vector<ScanTotals> part(T);

    auto worker = [&](int t) {
        u64 lo = Q1 + count * t / T;
        u64 hi = Q1 + count * (t + 1) / T;
        BucketScratch scr;
        scr.ensure(hi + 1);  // one allocation per worker, reused across q
        CompensatedSum S, Tsq, H, J;
        for (u64 q = lo + 1; q <= hi; ++q) {
            PerQ pq = scan_one_q(events, total_w2, bd, spf, x, q, scr);
            S.add(pq.S);
            Tsq.add(pq.Tsq);
            H.add(pq.H);
            J.add(pq.J);
        }
        part[t] = {S.value(), Tsq.value(), H.value(), J.value()};
    };

    if (T == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < T; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    CompensatedSum S, Tsq, H, J;
    for (const auto& p : part) {
        S.add(p.S);
        Tsq.add(p.Tsq);
        H.add(p.H);
        J.add(p.J);
    }
    return {S.value(), Tsq.value(), H.value(), J.value()};
}

}  // namespace detail

inline double variance_S(const FieldSpec& F, u64 x, u64 Q1, u64 Q2, int threads = 1) {
    if (!(Q1 < Q2 && Q2 <= x)) throw std::invalid_argument("variance_S: need 0 <= Q1 < Q2 <= x");
    const auto events = norm_events(F, x);
    const BaseData bd = base_data(F);
    return detail::scan_q_range(events, bd, x, Q1, Q2, threads).S;
}

// (H, J) over (Q1, Q2]; the exact split sum_a theta^2 = H_q + J_q per q.
inline std::pair<double, double> decomposition_HJ(const FieldSpec& F, u64 x, u64 Q1, u64 Q2,
                                                  int threads = 1) {
    if (!(Q1 < Q2 && Q2 <= x)) throw std::invalid_argument("decomposition_HJ: need 0 <= Q1 < Q2 <= x");
    const auto events = norm_events(F, x);
    if (static_cast<double>(events.size()) * static_cast<double>(Q2 - Q1) > 4e12)
        throw std::invalid_argument("decomposition_HJ: pair budget exceeded for this range");
    const BaseData bd = base_data(F);
    auto tot = detail::scan_q_range(events, bd, x, Q1, Q2, threads);
    return {tot.H, tot.J};
}

enum class PredictedForm { eq5_full_range, eq6_general, abelian_simplified };

inline const char* to_string(PredictedForm f) {
    switch (f) {
        case PredictedForm::eq5_full_range: return "eq5_full_range";
        case PredictedForm::eq6_general: return "eq6_general";
        case PredictedForm::abelian_simplified: return "abelian_simplified";
    }
    return "?";
}

// Theorem-side prediction for S(x; 0, Q).
//   Q = x:        [K:Q] x^2 log x + C1 x^2
//   Q < x:        [K:Q] xQ log x - (phi(m_K)/phi_K(m_K)) xQ log(x/Q) + C2 Qx
//   abelian:      the ratio equals [K:Q], so the general form collapses to
//                 [K:Q] xQ log Q + C2 Qx; both are evaluated and must agree.
inline std::pair<double, PredictedForm> predicted_S(const FieldSpec& F, u64 x, u64 Q,
                                                    const ConstantSet& constants) {
    if (Q < 1 || Q > x) throw std::invalid_argument("predicted_S: 1 <= Q <= x required");
    const double xd = static_cast<double>(x);
    const double Qd = static_cast<double>(Q);
    const double deg = static_cast<double>(F.degree);
    if (Q == x)
        return {deg * xd * xd * std::log(xd) + constants.C1 * xd * xd, PredictedForm::eq5_full_range};

    const double general = deg * xd * Qd * std::log(xd) -
                           constants.ratio_mk * xd * Qd * std::log(xd / Qd) +
                           constants.C2 * Qd * xd;
    if (!F.abelian()) return {general, PredictedForm::eq6_general};

    const double simplified = deg * xd * Qd * std::log(Qd) + constants.C2 * Qd * xd;
    if (std::abs(simplified - general) > 1e-9 * std::max(1.0, std::abs(general)))
        throw std::logic_error("predicted_S: abelian simplification disagrees with general form");
    return {simplified, PredictedForm::abelian_simplified};
}

struct VarianceReport {
    std::string field;
    u64 x = 0, Q1 = 0, Q2 = 0;
    double S = 0.0;
    double H = 0.0, J = 0.0;
    bool hj_computed = false;
    double predicted = 0.0;
    PredictedForm form = PredictedForm::eq6_general;
    double residual = 0.0;  // S - predicted
    double runtime_seconds = 0.0;
};

}  // namespace bdhvar
