#pragma once

// Rational-prime machinery: 64-bit modular arithmetic, Kronecker symbol,
// deterministic Miller-Rabin, a segmented sieve of Eratosthenes, a growable
// prime cache, trial-division factorization and multiplicative orders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bdhvar {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

inline u64 pow_mod(u64 a, u64 e, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin for the full 64-bit range.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

// Kronecker symbol (a|n), extending the Jacobi symbol to all integers.
inline int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    int v = 0;
    while ((n & 1) == 0) { n >>= 1; ++v; }
    if (v & 1) {
        i64 am8 = ((a % 8) + 8) % 8;
        if (am8 == 3 || am8 == 5) result = -result;
    }
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            i64 nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) result = -result;
        }
        std::swap(a, n);
        if ((a % 4 == 3) && (n % 4 == 3)) result = -result;
        a %= n;
    }
    return (n == 1) ? result : 0;
}

// Segmented sieve of Eratosthenes.  Visits primes in increasing order;
// the default segment keeps the working set inside L2.
template <typename F>
void for_each_prime(u64 limit, F&& visit, std::size_t segment_size = std::size_t{1} << 20) {
    if (limit < 2) return;
    u64 root = static_cast<u64>(std::max(0.0, std::floor(std::sqrt(static_cast<double>(limit)))));
    while ((root + 1) * (root + 1) <= limit) ++root;
    while (root * root > limit) --root;

    std::vector<char> small(root + 1, 1);
    for (u64 i = 2; i * i <= root; ++i)
        if (small[i])
            for (u64 j = i * i; j <= root; j += i) small[j] = 0;

    std::vector<u64> base;
    for (u64 i = 2; i <= root; ++i)
        if (small[i]) base.push_back(i);

    std::vector<char> sieve(segment_size);
    for (u64 low = 2; low <= limit; low += segment_size) {
        u64 high = std::min(low + segment_size - 1, limit);
        std::fill(sieve.begin(), sieve.begin() + (high - low + 1), 1);
        for (u64 p : base) {
            if (p * p > high) break;
            u64 start = std::max(p * p, ((low + p - 1) / p) * p);
            for (u64 j = start; j <= high; j += p) sieve[j - low] = 0;
        }
        for (u64 n = low; n <= high; ++n)
            if (sieve[n - low]) visit(n);
    }
}

// Same sieve restricted to primes in [lo, hi]; used by the concurrent
// enumeration paths, which partition [2, x] into disjoint ranges.
template <typename F>
void for_each_prime_in(u64 lo, u64 hi, F&& visit, std::size_t segment_size = std::size_t{1} << 20) {
    if (hi < 2 || hi < lo) return;
    lo = std::max<u64>(lo, 2);
    u64 root = 2;
    while (root * root <= hi) ++root;
    --root;

    std::vector<char> small(root + 1, 1);
    for (u64 i = 2; i * i <= root; ++i)
        if (small[i])
            for (u64 j = i * i; j <= root; j += i) small[j] = 0;
    std::vector<u64> base;
    for (u64 i = 2; i <= root; ++i)
        if (small[i]) base.push_back(i);

    std::vector<char> sieve(segment_size);
    for (u64 low = lo; low <= hi; low += segment_size) {
        u64 high = std::min(low + segment_size - 1, hi);
        std::fill(sieve.begin(), sieve.begin() + (high - low + 1), 1);
        for (u64 p : base) {
            if (p * p > high) break;
            u64 start = std::max(p * p, ((low + p - 1) / p) * p);
            for (u64 j = start; j <= high; j += p) sieve[j - low] = 0;
        }
        for (u64 n = low; n <= high; ++n)
            if (sieve[n - low] && n >= 2) visit(n);
    }
}

inline std::vector<u32> primes_up_to(u64 limit) {
    std::vector<u32> out;
    if (limit >= 2) out.reserve(static_cast<std::size_t>(1.26 * limit / std::max(1.0, std::log(static_cast<double>(limit)))) + 16);
    for_each_prime(limit, [&](u64 p) { out.push_back(static_cast<u32>(p)); });
    return out;
}

// Growable ascending prime list for algorithms that consume "the next prime"
// an unknown number of times (subgroup generation, Euler-product tails).
class PrimeList {
public:
    u64 operator[](std::size_t i) {
        while (i >= primes_.size()) extend();
        return primes_[i];
    }
    std::size_t size() const { return primes_.size(); }

private:
    void extend() {
        u64 lo = bound_ + 1;
        bound_ *= 2;
        for_each_prime_in(lo, bound_, [&](u64 p) { primes_.push_back(p); });
    }
    u64 bound_ = 1 << 16;
    std::vector<u64> primes_ = [] {
        std::vector<u64> v;
        for_each_prime(1 << 16, [&](u64 p) { v.push_back(p); });
        return v;
    }();
};

// Trial-division factorization; adequate for the moduli and conductors used
// here (q <= 1e7 in records, descriptor integers somewhat beyond).
inline std::vector<std::pair<u64, int>> factorize(u64 n) {
    std::vector<std::pair<u64, int>> f;
    for (u64 p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [p, e] : factorize(n)) r -= r / p;
    return r;
}

// Multiplicative order of a modulo n (gcd(a, n) = 1): start from phi(n) and
// strip prime factors while the power still fixes 1.
inline u64 multiplicative_order(u64 a, u64 n) {
    if (n == 1) return 1;
    a %= n;
    if (std::gcd(a, n) != 1) throw std::invalid_argument("multiplicative_order: gcd(a,n) != 1");
    u64 e = euler_phi(n);
    for (auto [p, k] : factorize(e)) {
        for (int i = 0; i < k; ++i) {
            if (pow_mod(a, e / p, n) == 1)
                e /= p;
            else
                break;
        }
    }
    return e;
}

// Smallest-prime-factor table; spf(n) in O(1) after a linear-ish sieve.
class SpfSieve {
public:
    explicit SpfSieve(u64 limit) : spf_(limit + 1, 0) {
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i] == 0) {
                for (u64 j = i; j <= limit; j += i)
                    if (spf_[j] == 0) spf_[j] = static_cast<u32>(i);
            }
        }
    }
    u32 spf(u64 n) const { return spf_[n]; }
    u64 limit() const { return spf_.size() - 1; }

    // Factor n <= limit via repeated spf lookups.
    void factor(u64 n, std::vector<std::pair<u64, int>>& out) const {
        out.clear();
        while (n > 1) {
            u64 p = spf_[n];
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            out.emplace_back(p, e);
        }
    }

private:
    std::vector<u32> spf_;
};

}  // namespace bdhvar
