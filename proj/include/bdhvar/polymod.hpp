#pragma once

// Univariate polynomial arithmetic over Z/pZ, enough to read off residue
// degrees of unramified primes: for a monic integer polynomial whose
// splitting behaviour is equal-degree (the Galois case), the residue degree
// at p is the least d >= 1 with X^(p^d) == X modulo (f, p).  The same
// machinery provides a factorization-based cross-check for the closed-form
// splitting rules, and an integer cyclotomic-polynomial builder for tests.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bdhvar/primes.hpp"

namespace bdhvar {

// Coefficients low-to-high, reduced mod p, no leading zeros.
using PolyMod = std::vector<u64>;

inline void poly_trim(PolyMod& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline PolyMod poly_from_int(const std::vector<long long>& coeffs, u64 p) {
    PolyMod a(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        long long c = coeffs[i] % static_cast<long long>(p);
        if (c < 0) c += static_cast<long long>(p);
        a[i] = static_cast<u64>(c);
    }
    poly_trim(a);
    return a;
}

// Remainder of a modulo monic-normalized b.
inline PolyMod poly_rem(PolyMod a, const PolyMod& b, u64 p) {
    if (b.empty()) throw std::invalid_argument("poly_rem: division by zero polynomial");
    u64 lead_inv = pow_mod(b.back(), p - 2, p);  // p prime
    while (a.size() >= b.size()) {
        u64 q = mul_mod(a.back(), lead_inv, p);
        if (q != 0) {
            std::size_t off = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) {
                u64 sub = mul_mod(q, b[i], p);
                a[off + i] = (a[off + i] >= sub) ? a[off + i] - sub : a[off + i] + p - sub;
            }
        }
        a.pop_back();
        poly_trim(a);
        if (a.size() < b.size()) break;
    }
    poly_trim(a);
    return a;
}

inline PolyMod poly_mulmod(const PolyMod& a, const PolyMod& b, const PolyMod& f, u64 p) {
    if (a.empty() || b.empty()) return {};
    PolyMod c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + mul_mod(a[i], b[j], p)) % p;
    }
    return poly_rem(std::move(c), f, p);
}

inline PolyMod poly_powmod(PolyMod base, u64 e, const PolyMod& f, u64 p) {
    PolyMod r{1};
    base = poly_rem(std::move(base), f, p);
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e >>= 1;
    }
    return r;
}

inline PolyMod poly_gcd(PolyMod a, PolyMod b, u64 p) {
    while (!b.empty()) {
        PolyMod r = poly_rem(std::move(a), b, p);
        a = std::move(b);
        b = std::move(r);
    }
    // normalize monic
    if (!a.empty() && a.back() != 1) {
        u64 inv = pow_mod(a.back(), p - 2, p);
        for (auto& c : a) c = mul_mod(c, inv, p);
    }
    return a;
}

inline bool poly_is_squarefree_mod(const std::vector<long long>& coeffs, u64 p) {
    PolyMod f = poly_from_int(coeffs, p);
    if (f.size() < 2) return false;
    PolyMod df(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) df[i - 1] = mul_mod(f[i], i % p, p);
    poly_trim(df);
    if (df.empty()) return false;  // derivative vanished mod p
    return poly_gcd(f, df, p).size() <= 1;
}

// Residue degree at an unramified prime p of a monic polynomial defining a
// Galois field: least d with X^(p^d) == X mod (f, p).  All irreducible
// factors of f mod p then share degree d; if the Frobenius orbit structure
// is inconsistent with equal-degree splitting the input was not Galois (or
// p should have been declared ramified) and we refuse to guess.
inline int frobenius_residue_degree(const std::vector<long long>& coeffs, u64 p) {
    PolyMod f = poly_from_int(coeffs, p);
    int n = static_cast<int>(f.size()) - 1;
    if (n < 1) throw std::invalid_argument("frobenius_residue_degree: degenerate polynomial mod p");
    PolyMod x{0, 1};
    PolyMod fr = x;
    for (int d = 1; d <= n; ++d) {
        fr = poly_powmod(std::move(fr), p, f, p);  // X^(p^d) mod (f, p)
        if (fr == x) {
            if (n % d != 0)
                throw std::runtime_error("frobenius_residue_degree: unequal-degree factorization (input not Galois?)");
            return d;
        }
    }
    throw std::runtime_error("frobenius_residue_degree: no residue degree <= deg f (is p ramified or f reducible?)");
}

// Distinct-degree probe used as the independent factorization oracle in
// tests: smallest d with gcd(X^(p^d) - X, f) nontrivial, plus whether the
// gcd is all of f (equal-degree splitting).
struct DistinctDegreeProbe {
    int degree = 0;
    bool full_split = false;
};

inline DistinctDegreeProbe distinct_degree_probe(const std::vector<long long>& coeffs, u64 p) {
    PolyMod f = poly_from_int(coeffs, p);
    int n = static_cast<int>(f.size()) - 1;
    PolyMod x{0, 1};
    PolyMod fr = x;
    for (int d = 1; d <= n; ++d) {
        fr = poly_powmod(std::move(fr), p, f, p);
        PolyMod diff = fr;
        // fr - x
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = (diff[1] >= 1) ? diff[1] - 1 : p - 1;
        poly_trim(diff);
        PolyMod g = diff.empty() ? f : poly_gcd(f, diff, p);
        if (g.size() > 1) return {d, g.size() == f.size()};
    }
    throw std::runtime_error("distinct_degree_probe: no factor found");
}

// n-th cyclotomic polynomial with integer coefficients, by exact division of
// x^n - 1 by the Phi_d for proper divisors d.  Fine for the small n used in
// tests and descriptors.
inline std::vector<long long> cyclotomic_polynomial(long n) {
    if (n < 1) throw std::invalid_argument("cyclotomic_polynomial: n >= 1 required");
    auto divide_exact = [](std::vector<long long> num, const std::vector<long long>& den) {
        std::vector<long long> q(num.size() - den.size() + 1, 0);
        for (std::size_t i = q.size(); i-- > 0;) {
            long long c = num[i + den.size() - 1] / den.back();
            q[i] = c;
            for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= c * den[j];
        }
        return q;
    };
    std::vector<long long> poly(static_cast<std::size_t>(n) + 1, 0);
    poly[0] = -1;
    poly[static_cast<std::size_t>(n)] = 1;  // x^n - 1
    for (long d = 1; d < n; ++d) {
        if (n % d == 0) poly = divide_exact(std::move(poly), cyclotomic_polynomial(d));
    }
    return poly;
}

}  // namespace bdhvar
