#include "geoalert/hve.hpp"

#include <numeric>

namespace geoalert::hve {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<u128>(a) + b) % m);
}

std::uint64_t negmod(std::uint64_t a, std::uint64_t m) { return a == 0 ? 0 : m - a; }

}  // namespace

bool is_prime(std::uint64_t v) {
    if (v < 2) return false;
    for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (v % small == 0) return v == small;
    }
    std::uint64_t d = v - 1;
    int r = 0;
    while ((d & 1U) == 0) {
        d >>= 1;
        ++r;
    }
    // Deterministic Miller-Rabin witness set for 64-bit integers.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, v);
        if (x == 1 || x == v - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x, v);
            if (x == v - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

void GroupParams::validate() const {
    if (!is_prime(p) || !is_prime(q)) throw ParameterError("P and Q must be prime");
    if (p == q) throw ParameterError("P and Q must be distinct");
    if (static_cast<u128>(p) * q > UINT64_MAX) throw ParameterError("P*Q must fit in 64 bits");
    if (width == 0) throw ParameterError("HVE width must be at least 1");
}

GroupParams GroupParams::mock_default(std::size_t width) {
    return GroupParams{4294967291ULL, 4294967279ULL, width};
}

MockPairingGroup::MockPairingGroup(GroupParams params)
    : params_(params), counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    params_.validate();
}

GroupElement MockPairingGroup::mul(GroupElement a, GroupElement b) const noexcept {
    return {addmod(a.exp_p, b.exp_p, params_.p), addmod(a.exp_q, b.exp_q, params_.q)};
}

GroupElement MockPairingGroup::pow(GroupElement a, std::uint64_t k) const noexcept {
    return {mulmod(a.exp_p, k % params_.p, params_.p), mulmod(a.exp_q, k % params_.q, params_.q)};
}

GroupElement MockPairingGroup::inv(GroupElement a) const noexcept {
    return {negmod(a.exp_p, params_.p), negmod(a.exp_q, params_.q)};
}

TargetElement MockPairingGroup::pair(GroupElement a, GroupElement b) const noexcept {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return {mulmod(a.exp_p, b.exp_p, params_.p), mulmod(a.exp_q, b.exp_q, params_.q)};
}

TargetElement MockPairingGroup::target_mul(TargetElement a, TargetElement b) const noexcept {
    return {addmod(a.exp_p, b.exp_p, params_.p), addmod(a.exp_q, b.exp_q, params_.q)};
}

TargetElement MockPairingGroup::target_inv(TargetElement a) const noexcept {
    return {negmod(a.exp_p, params_.p), negmod(a.exp_q, params_.q)};
}

TargetElement MockPairingGroup::target_pow(TargetElement a, std::uint64_t k) const noexcept {
    return {mulmod(a.exp_p, k % params_.p, params_.p), mulmod(a.exp_q, k % params_.q, params_.q)};
}

GroupElement MockPairingGroup::random_gp(Rng& rng) const {
    return {1 + uniform_below(rng, params_.p - 1), 0};
}

GroupElement MockPairingGroup::random_gq(Rng& rng) const {
    return {0, 1 + uniform_below(rng, params_.q - 1)};
}

std::uint64_t MockPairingGroup::random_zp(Rng& rng) const { return 1 + uniform_below(rng, params_.p - 1); }

std::uint64_t MockPairingGroup::random_zn(Rng& rng) const {
    const std::uint64_t n = params_.n();
    for (;;) {
        const std::uint64_t s = 1 + uniform_below(rng, n - 1);
        if (std::gcd(s, n) == 1) return s;
    }
}

TargetElement MockPairingGroup::random_target(Rng& rng) const {
    return {uniform_below(rng, params_.p), uniform_below(rng, params_.q)};
}

}  // namespace geoalert::hve
