#pragma once

// Field catalog: a concrete set of Galois number fields K/Q together with
// closed-form splitting data (e_p, f_p, g_p) for every rational prime.
//
// Supported kinds:
//   rational          K = Q
//   quadratic(d)      K = Q(sqrt d), d squarefree, d != 0, 1
//   cyclotomic(n)     K = Q(zeta_n), n >= 3, n != 2 mod 4
//   galois(poly)      any Galois K given by a monic defining polynomial,
//                     with the conductor m_K of the maximal abelian subfield
//                     and the ramified primes supplied by the caller.
//
// The conductor m_K is the least m with the maximal abelian subfield of K
// contained in Q(zeta_m); it drives everything in galois_image.hpp.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bdhvar/polymod.hpp"
#include "bdhvar/primes.hpp"

namespace bdhvar {

enum class FieldKind { rational, quadratic, cyclotomic, galois };

struct SplittingDatum {
    u64 p = 0;
    int e = 1;  // ramification index
    int f = 1;  // residue degree
    int g = 1;  // number of primes above p
    bool known = true;  // false only for generic-galois ramified p without a table entry
};

struct FieldSpec {
    FieldKind kind = FieldKind::rational;
    long long d = 0;  // quadratic: squarefree d
    long long n = 0;  // cyclotomic: n
    std::vector<long long> poly;  // galois: monic, coefficients low-to-high

    int degree = 1;
    u64 m_k = 1;
    std::vector<u64> ramified;  // sorted ascending
    std::map<u64, SplittingDatum> ramified_table;  // galois kind, optional

    std::string name = "Q";

    // quadratic: discriminant of Q(sqrt d); cached for Kronecker symbols
    long long disc = 1;
    // cyclotomic: factorization of phi(n), cached for order computations
    std::vector<std::pair<u64, int>> phi_n_factors;

    bool abelian() const { return kind != FieldKind::galois; }
    bool is_ramified(u64 p) const {
        return std::binary_search(ramified.begin(), ramified.end(), p);
    }
};

inline FieldSpec build_rational() {
    FieldSpec F;
    F.kind = FieldKind::rational;
    F.degree = 1;
    F.m_k = 1;
    F.name = "Q";
    return F;
}

inline FieldSpec build_quadratic(long long d) {
    if (d == 0 || d == 1) throw std::invalid_argument("quadratic: d must not be 0 or 1");
    u64 ad = static_cast<u64>(d < 0 ? -d : d);
    for (auto [p, e] : factorize(ad))
        if (e > 1) throw std::invalid_argument("quadratic: d must be squarefree");

    FieldSpec F;
    F.kind = FieldKind::quadratic;
    F.d = d;
    F.degree = 2;
    bool one_mod_four = ((d % 4) + 4) % 4 == 1;
    F.disc = one_mod_four ? d : 4 * d;
    F.m_k = one_mod_four ? ad : 4 * ad;
    u64 adisc = static_cast<u64>(F.disc < 0 ? -F.disc : F.disc);
    for (auto [p, e] : factorize(adisc)) F.ramified.push_back(p);
    std::sort(F.ramified.begin(), F.ramified.end());
    F.name = (d == -1) ? "Q(i)" : "quad:" + std::to_string(d);
    return F;
}

inline FieldSpec build_cyclotomic(long long n) {
    if (n < 3) throw std::invalid_argument("cyclotomic: n >= 3 required");
    if (n % 4 == 2) throw std::invalid_argument("cyclotomic: n == 2 mod 4 rejected (same field as n/2)");
    FieldSpec F;
    F.kind = FieldKind::cyclotomic;
    F.n = n;
    F.m_k = static_cast<u64>(n);
    u64 phi = euler_phi(static_cast<u64>(n));
    F.degree = static_cast<int>(phi);
    for (auto [p, e] : factorize(static_cast<u64>(n))) F.ramified.push_back(p);
    std::sort(F.ramified.begin(), F.ramified.end());
    F.phi_n_factors = factorize(phi);
    F.name = "cyc:" + std::to_string(n);
    return F;
}

inline FieldSpec build_galois(std::vector<long long> poly, u64 m_k, std::vector<u64> ramified,
                              std::map<u64, SplittingDatum> table = {}) {
    while (!poly.empty() && poly.back() == 0) poly.pop_back();
    if (poly.size() < 2) throw std::invalid_argument("galois: polynomial degree >= 1 required");
    if (poly.back() != 1) throw std::invalid_argument("galois: polynomial must be monic");
    if (m_k == 0) throw std::invalid_argument("galois: m_K must be positive");
    int degree = static_cast<int>(poly.size()) - 1;

    // Cheap reducibility screen: f must stay squarefree at some unramified
    // prime; full irreducibility over Q is the caller's contract.
    std::sort(ramified.begin(), ramified.end());
    {
        PrimeList pl;
        bool ok = false;
        for (std::size_t i = 0; i < 25 && !ok; ++i) {
            u64 p = pl[i];
            if (std::binary_search(ramified.begin(), ramified.end(), p)) continue;
            ok = poly_is_squarefree_mod(poly, p);
        }
        if (!ok) throw std::invalid_argument("galois: polynomial not squarefree at small unramified primes");
    }
    for (auto& [p, dat] : table) {
        if (dat.e * dat.f * dat.g != degree)
            throw std::invalid_argument("galois: ramification table entry with e*f*g != degree");
        if (!std::binary_search(ramified.begin(), ramified.end(), p))
            throw std::invalid_argument("galois: table entry for a prime not listed as ramified");
    }

    FieldSpec F;
    F.kind = FieldKind::galois;
    F.poly = std::move(poly);
    F.degree = degree;
    F.m_k = m_k;
    F.ramified = std::move(ramified);
    F.ramified_table = std::move(table);
    std::ostringstream os;
    os << "galois:";
    for (std::size_t i = 0; i < F.poly.size(); ++i) os << (i ? "," : "") << F.poly[i];
    os << ";" << m_k << ";";
    for (std::size_t i = 0; i < F.ramified.size(); ++i) os << (i ? "," : "") << F.ramified[i];
    F.name = os.str();
    return F;
}

// Splitting type of a rational prime p in K.
inline SplittingDatum splitting(const FieldSpec& F, u64 p) {
    if (!is_prime(p)) throw std::invalid_argument("splitting: p must be prime");
    SplittingDatum s;
    s.p = p;
    switch (F.kind) {
        case FieldKind::rational:
            return s;

        case FieldKind::quadratic: {
            if (F.is_ramified(p)) {
                s.e = 2;
                return s;
            }
            int chi = kronecker(F.disc, static_cast<i64>(p));
            if (chi == 1) {
                s.g = 2;  // split
            } else {
                s.f = 2;  // inert
            }
            return s;
        }

        case FieldKind::cyclotomic: {
            u64 n = static_cast<u64>(F.n);
            if (n % p == 0) {
                u64 pa = 1, m = n;
                while (m % p == 0) { m /= p; pa *= p; }
                s.e = static_cast<int>(euler_phi(pa));
                s.f = (m == 1) ? 1 : static_cast<int>(multiplicative_order(p % m, m));
                s.g = F.degree / (s.e * s.f);
                return s;
            }
            // Unramified: f = order of p mod n, computed by stripping prime
            // factors from the cached phi(n).
            u64 e = static_cast<u64>(F.degree);
            for (auto [r, k] : F.phi_n_factors) {
                for (int i = 0; i < k; ++i) {
                    if (pow_mod(p % n, e / r, n) == 1)
                        e /= r;
                    else
                        break;
                }
            }
            s.f = static_cast<int>(e);
            s.g = F.degree / s.f;
            return s;
        }

        case FieldKind::galois: {
            if (F.is_ramified(p)) {
                auto it = F.ramified_table.find(p);
                if (it != F.ramified_table.end()) return it->second;
                s.e = F.degree;  // conservative placeholder, keeps e*f*g = degree
                s.known = false;
                return s;
            }
            s.f = frobenius_residue_degree(F.poly, p);
            s.g = F.degree / s.f;
            return s;
        }
    }
    throw std::logic_error("splitting: unreachable");
}

// CLI descriptor syntax:
//   "Q" | "Q(i)" | "quad:d" | "cyc:n" | "galois:c0,c1,...,ck;mK;p1,p2,..."
inline FieldSpec parse_field(const std::string& descriptor) {
    auto parse_ll = [](const std::string& s) {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("field descriptor: bad integer '" + s + "'");
        return v;
    };
    auto split_list = [&](const std::string& s) {
        std::vector<long long> out;
        std::string item;
        std::istringstream is(s);
        while (std::getline(is, item, ','))
            if (!item.empty()) out.push_back(parse_ll(item));
        return out;
    };

    if (descriptor == "Q") return build_rational();
    if (descriptor == "Q(i)") return build_quadratic(-1);
    if (descriptor.rfind("quad:", 0) == 0) return build_quadratic(parse_ll(descriptor.substr(5)));
    if (descriptor.rfind("cyc:", 0) == 0) return build_cyclotomic(parse_ll(descriptor.substr(4)));
    if (descriptor.rfind("galois:", 0) == 0) {
        std::string body = descriptor.substr(7);
        std::vector<std::string> parts;
        std::string item;
        std::istringstream is(body);
        while (std::getline(is, item, ';')) parts.push_back(item);
        if (parts.size() < 2) throw std::invalid_argument("field descriptor: galois needs coeffs;mK[;ramified]");
        std::vector<long long> poly = split_list(parts[0]);
        long long mk = parse_ll(parts[1]);
        if (mk <= 0) throw std::invalid_argument("field descriptor: m_K must be positive");
        std::vector<u64> ram;
        if (parts.size() >= 3)
            for (long long p : split_list(parts[2])) {
                if (p < 2 || !is_prime(static_cast<u64>(p)))
                    throw std::invalid_argument("field descriptor: ramified entries must be prime");
                ram.push_back(static_cast<u64>(p));
            }
        return build_galois(std::move(poly), static_cast<u64>(mk), std::move(ram));
    }
    throw std::invalid_argument("field descriptor: unrecognized '" + descriptor + "'");
}

}  // namespace bdhvar
