#pragma once

// The image group G_q and the generalized totient phi_K(q) = |G_q|.
//
// G_q is the subgroup of (Z/qZ)* cut out by Gal(K(zeta_q)/K); concretely it
// is the set of residues hit by norms of prime ideals coprime to q.  Two
// independent routes are implemented:
//
//   1. generation: accumulate the subgroup generated by p^{f_p} mod q over
//      ascending primes p until it stabilizes (Chebotarev guarantees the
//      limit is exactly G_q);
//   2. formula: phi_K is multiplicative, phi_K(l^a) = phi(l^a) for l not
//      dividing m_K, and for l | m_K with b = ord_l(m_K)
//          phi_K(l^a) = phi_K(l)            for a <= b,
//          phi_K(l^a) = l^(a-b) phi_K(l)    for a >= b,
//      so only the finitely many phi_K(l), l | m_K, need route 1.
//
// The generation stopping rule is necessarily heuristic (no effective bound
// is used): we stop once the subgroup has survived a long streak of samples
// without growing AND its index in (Z/qZ)* divides [K:Q] (the index equals
// the degree of a subfield of K, so this certifies plausibility).  Running
// out of samples raises; we never return a silently wrong record.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "bdhvar/field.hpp"
#include "bdhvar/primes.hpp"

namespace bdhvar {

struct StabilizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GqRecord {
    u64 q = 1;
    std::vector<u32> members;  // ascending residues in [1, q]
    u64 phi_k = 1;
    enum class Method { generated, formula } method = Method::generated;

    bool contains(u64 r) const {
        return std::binary_search(members.begin(), members.end(), static_cast<u32>(r));
    }
};

struct GenerationOptions {
    u64 max_samples = 1'000'000;  // hard cap on sampled primes
    u64 max_q = 10'000'000;       // bitset cap per record
};

inline GqRecord gq_by_generation(const FieldSpec& F, u64 q, const GenerationOptions& opt = {}) {
    if (q < 1) throw std::invalid_argument("gq_by_generation: q >= 1 required");
    if (q > opt.max_q) throw std::invalid_argument("gq_by_generation: q exceeds record cap");
    GqRecord rec;
    rec.q = q;
    rec.method = GqRecord::Method::generated;
    if (q <= 2) {
        rec.members = {1};
        rec.phi_k = 1;
        return rec;
    }

    u64 phi_q = euler_phi(q);
    std::vector<bool> in(static_cast<std::size_t>(q), false);
    std::vector<u32> members{1};
    in[1] = true;

    // H <- H * <g> using coset representatives g, g^2, ... until g^j lands
    // back inside H; the ambient group is abelian so this is the closure.
    auto add_generator = [&](u64 g) {
        if (in[g]) return false;
        std::vector<u64> reps;
        u64 t = g;
        while (!in[t]) {
            reps.push_back(t);
            t = mul_mod(t, g, q);
        }
        std::size_t old_size = members.size();
        for (u64 r : reps)
            for (std::size_t i = 0; i < old_size; ++i) {
                u64 m = mul_mod(r, members[i], q);
                if (!in[m]) {
                    in[m] = true;
                    members.push_back(static_cast<u32>(m));
                }
            }
        return true;
    };

    const double window_d = 20.0 * F.degree * std::log2(static_cast<double>(q) + 1.0);
    const u64 window = static_cast<u64>(window_d) + 1;
    u64 unchanged = 0;
    u64 samples = 0;
    PrimeList primes;

    for (std::size_t i = 0;; ++i) {
        u64 p = primes[i];
        if (q % p == 0 || F.m_k % p == 0 || F.is_ramified(p)) continue;
        ++samples;
        int f = splitting(F, p).f;
        u64 r = pow_mod(p % q, static_cast<u64>(f), q);
        if (add_generator(r))
            unchanged = 0;
        else
            ++unchanged;

        if (members.size() == phi_q) break;  // full group: no room to grow
        if (unchanged >= window) {
            u64 index = phi_q / members.size();
            if (phi_q % members.size() == 0 && static_cast<u64>(F.degree) % index == 0) break;
        }
        if (samples >= opt.max_samples)
            throw StabilizationError("gq_by_generation: subgroup did not stabilize for q=" + std::to_string(q));
    }

    std::sort(members.begin(), members.end());
    rec.members = std::move(members);
    rec.phi_k = rec.members.size();
    return rec;
}

// phi_K(l) and b_l = ord_l(m_K) for the primes l | m_K, plus the derived
// values at m_K itself.  phi(m_K)/phi_K(m_K) equals the degree of the
// maximal abelian subfield, hence [K:Q] exactly when K/Q is abelian.
struct BaseData {
    struct AtPrime {
        int b = 0;       // ord_l(m_K)
        u64 phi_k_l = 1; // phi_K(l)
    };
    std::map<u64, AtPrime> at;
    u64 m_k = 1;
    u64 phi_m_k = 1;
    u64 phi_k_m_k = 1;
    int degree = 1;

    double ratio() const { return static_cast<double>(phi_m_k) / static_cast<double>(phi_k_m_k); }
    u64 ratio_int() const { return phi_m_k / phi_k_m_k; }
};

inline BaseData base_data(const FieldSpec& F) {
    BaseData bd;
    bd.m_k = F.m_k;
    bd.degree = F.degree;
    bd.phi_m_k = euler_phi(F.m_k);
    for (auto [l, b] : factorize(F.m_k)) {
        BaseData::AtPrime ap;
        ap.b = b;
        ap.phi_k_l = gq_by_generation(F, l).phi_k;
        if ((l - 1) % ap.phi_k_l != 0)
            throw std::logic_error("base_data: phi_K(l) does not divide l-1");
        bd.at.emplace(l, ap);
        bd.phi_k_m_k *= ap.phi_k_l;  // contribution l^(b-b) * phi_K(l)
    }
    if (bd.phi_m_k % bd.phi_k_m_k != 0)
        throw std::logic_error("base_data: phi_K(m_K) does not divide phi(m_K)");
    return bd;
}

namespace detail {
inline u64 ipow(u64 b, int e) {
    u64 r = 1;
    while (e-- > 0) r *= b;
    return r;
}
}  // namespace detail

// Product formula for phi_K(q) given the prime factorization of q.
inline u64 phi_k_from_factors(const BaseData& bd, const std::vector<std::pair<u64, int>>& factors) {
    u64 r = 1;
    for (auto [l, a] : factors) {
        auto it = bd.at.find(l);
        if (it == bd.at.end()) {
            r *= detail::ipow(l, a - 1) * (l - 1);
        } else if (a >= it->second.b) {
            r *= detail::ipow(l, a - it->second.b) * it->second.phi_k_l;
        } else {
            r *= it->second.phi_k_l;
        }
    }
    return r;
}

inline u64 phi_k_by_formula(const FieldSpec& F, const BaseData& bd, u64 q) {
    if (q < 1) throw std::invalid_argument("phi_k_by_formula: q >= 1 required");
    (void)F;
    return phi_k_from_factors(bd, factorize(q));
}

// phi_K(n) for all n <= limit via a smallest-prime-factor sieve.
inline std::vector<u64> phi_k_table(const BaseData& bd, u64 limit) {
    SpfSieve spf(limit);
    std::vector<u64> table(limit + 1, 0);
    if (limit >= 1) table[1] = 1;
    std::vector<std::pair<u64, int>> factors;
    for (u64 n = 2; n <= limit; ++n) {
        spf.factor(n, factors);
        table[n] = phi_k_from_factors(bd, factors);
    }
    return table;
}

}  // namespace bdhvar
