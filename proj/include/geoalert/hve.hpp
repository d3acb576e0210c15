#pragma once

// Hidden Vector Encryption over a symmetric composite-order bilinear group.
//
// The scheme is written against the PairingGroup concept. The shipped backend,
// MockPairingGroup, stores every element of G = G_p x G_q by its discrete logs
// (exp mod P, exp mod Q) with respect to fixed generators g_p, g_q. That makes
// group laws, subgroup orthogonality and bilinearity exact, and makes the
// scheme trivially breakable: it exists to test the algebra and to count
// pairings, never to protect data.

#include <atomic>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "geoalert/errors.hpp"
#include "geoalert/pattern.hpp"
#include "geoalert/random.hpp"

namespace geoalert::hve {

struct GroupParams {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    std::size_t width = 0;

    std::uint64_t n() const noexcept { return p * q; }
    // Throws ParameterError unless p != q are both prime, p*q fits 64 bits and width >= 1.
    void validate() const;
    // 32-bit primes 2^32 - 5 and 2^32 - 17.
    static GroupParams mock_default(std::size_t width);
};

bool is_prime(std::uint64_t v);

struct GroupElement {
    std::uint64_t exp_p = 0;
    std::uint64_t exp_q = 0;
    bool operator==(const GroupElement&) const = default;
};

struct TargetElement {
    std::uint64_t exp_p = 0;
    std::uint64_t exp_q = 0;
    auto operator<=>(const TargetElement&) const = default;
};

template <class G>
concept PairingGroup = requires(const G& g, typename G::Element x, typename G::Target t,
                                std::uint64_t k, Rng& rng) {
    { g.identity() } -> std::same_as<typename G::Element>;
    { g.mul(x, x) } -> std::same_as<typename G::Element>;
    { g.pow(x, k) } -> std::same_as<typename G::Element>;
    { g.inv(x) } -> std::same_as<typename G::Element>;
    { g.pair(x, x) } -> std::same_as<typename G::Target>;
    { g.target_mul(t, t) } -> std::same_as<typename G::Target>;
    { g.target_inv(t) } -> std::same_as<typename G::Target>;
    { g.target_pow(t, k) } -> std::same_as<typename G::Target>;
    { g.random_gp(rng) } -> std::same_as<typename G::Element>;
    { g.random_gq(rng) } -> std::same_as<typename G::Element>;
    { g.random_zp(rng) } -> std::same_as<std::uint64_t>;
    { g.random_zn(rng) } -> std::same_as<std::uint64_t>;
    { g.pairing_count() } -> std::same_as<std::uint64_t>;
    g.reset_pairing_count();
};

// Discrete-log representation backend. Copies share one pairing counter.
class MockPairingGroup {
public:
    using Element = GroupElement;
    using Target = TargetElement;

    explicit MockPairingGroup(GroupParams params);

    const GroupParams& params() const noexcept { return params_; }

    Element identity() const noexcept { return {}; }
    Element mul(Element a, Element b) const noexcept;
    Element pow(Element a, std::uint64_t k) const noexcept;
    Element inv(Element a) const noexcept;
    // e(g_p^a g_q^b, g_p^c g_q^d) = e(g_p,g_p)^(ac) e(g_q,g_q)^(bd); cross terms vanish.
    Target pair(Element a, Element b) const noexcept;

    Target target_identity() const noexcept { return {}; }
    Target target_mul(Target a, Target b) const noexcept;
    Target target_inv(Target a) const noexcept;
    Target target_pow(Target a, std::uint64_t k) const noexcept;

    // Non-identity elements of G_p / G_q.
    Element random_gp(Rng& rng) const;
    Element random_gq(Rng& rng) const;
    std::uint64_t random_zp(Rng& rng) const;  // in [1, P)
    std::uint64_t random_zn(Rng& rng) const;  // in [1, N), coprime to N
    Target random_target(Rng& rng) const;

    // Strips the G_q component (mock-only: needs the factorization).
    Element project_p(Element a) const noexcept { return {a.exp_p, 0}; }

    std::uint64_t pairing_count() const noexcept { return counter_->load(std::memory_order_relaxed); }
    void reset_pairing_count() const noexcept { counter_->store(0, std::memory_order_relaxed); }

private:
    GroupParams params_;
    std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

static_assert(PairingGroup<MockPairingGroup>);

template <PairingGroup G>
struct SecretKey {
    typename G::Element gq;
    std::uint64_t a = 0;
    std::vector<typename G::Element> u, h, w;
    typename G::Element g;
    typename G::Element v;
};

template <PairingGroup G>
struct PublicKey {
    typename G::Element gq;
    typename G::Element V;
    typename G::Target A;
    std::vector<typename G::Element> U, H, W;
};

template <PairingGroup G>
struct KeyPair {
    PublicKey<G> pk;
    SecretKey<G> sk;
};

template <PairingGroup G>
struct Ciphertext {
    typename G::Target c_prime;
    typename G::Element c0;
    std::vector<typename G::Element> c1, c2;
};

template <PairingGroup G>
struct Token {
    struct Component {
        std::size_t position = 0;
        typename G::Element k1;
        typename G::Element k2;
    };
    Pattern pattern;
    typename G::Element k0;
    std::vector<Component> components;  // one per non-star position, ascending
};

// Finite set of valid plaintexts; decryptions outside it are reported as no match.
template <PairingGroup G>
class MessageDomain {
public:
    void add(const typename G::Target& m) { members_.insert(m); }
    bool contains(const typename G::Target& m) const { return members_.contains(m); }
    std::size_t size() const noexcept { return members_.size(); }

private:
    std::set<typename G::Target> members_;
};

template <PairingGroup G>
class Scheme {
public:
    using Element = typename G::Element;
    using Target = typename G::Target;

    Scheme(G group, std::size_t width) : group_(std::move(group)), width_(width) {
        if (width_ == 0) throw ParameterError("HVE width must be at least 1");
    }

    const G& group() const noexcept { return group_; }
    std::size_t width() const noexcept { return width_; }

    KeyPair<G> setup(std::uint64_t seed) const {
        Rng rng(seed);
        KeyPair<G> kp;
        SecretKey<G>& sk = kp.sk;
        sk.gq = group_.random_gq(rng);
        sk.a = group_.random_zp(rng);
        sk.g = group_.random_gp(rng);
        sk.v = group_.random_gp(rng);
        for (std::size_t i = 0; i < width_; ++i) {
            sk.u.push_back(group_.random_gp(rng));
            sk.h.push_back(group_.random_gp(rng));
            sk.w.push_back(group_.random_gp(rng));
        }
        PublicKey<G>& pk = kp.pk;
        pk.gq = sk.gq;
        pk.V = group_.mul(sk.v, group_.random_gq(rng));
        pk.A = group_.target_pow(group_.pair(sk.g, sk.v), sk.a);
        for (std::size_t i = 0; i < width_; ++i) {
            pk.U.push_back(group_.mul(sk.u[i], group_.random_gq(rng)));
            pk.H.push_back(group_.mul(sk.h[i], group_.random_gq(rng)));
            pk.W.push_back(group_.mul(sk.w[i], group_.random_gq(rng)));
        }
        return kp;
    }

    Ciphertext<G> encrypt(const PublicKey<G>& pk, const Pattern& index, const Target& message,
                          std::uint64_t seed) const {
        check_width(index.width());
        if (index.has_stars()) {
            throw ParameterError("cannot encrypt an index containing wildcards");
        }
        Rng rng(seed);
        const std::uint64_t s = group_.random_zn(rng);
        Ciphertext<G> ct;
        ct.c_prime = group_.target_mul(message, group_.target_pow(pk.A, s));
        ct.c0 = group_.mul(group_.pow(pk.V, s), group_.random_gq(rng));
        for (std::size_t i = 0; i < width_; ++i) {
            const Element base = group_.mul(group_.pow(pk.U[i], index[i] == '1' ? 1 : 0), pk.H[i]);
            ct.c1.push_back(group_.mul(group_.pow(base, s), group_.random_gq(rng)));
            ct.c2.push_back(group_.mul(group_.pow(pk.W[i], s), group_.random_gq(rng)));
        }
        return ct;
    }

    Token<G> gen_token(const SecretKey<G>& sk, const Pattern& pattern, std::uint64_t seed) const {
        check_width(pattern.width());
        Rng rng(seed);
        Token<G> tk;
        tk.pattern = pattern;
        tk.k0 = group_.pow(sk.g, sk.a);
        for (std::size_t i = 0; i < width_; ++i) {
            if (pattern[i] == kStar) continue;
            const std::uint64_t r1 = group_.random_zp(rng);
            const std::uint64_t r2 = group_.random_zp(rng);
            const Element base = group_.mul(group_.pow(sk.u[i], pattern[i] == '1' ? 1 : 0), sk.h[i]);
            tk.k0 = group_.mul(tk.k0, group_.mul(group_.pow(base, r1), group_.pow(sk.w[i], r2)));
            tk.components.push_back({i, group_.pow(sk.v, r1), group_.pow(sk.v, r2)});
        }
        return tk;
    }

    // C' * prod_J e(C_i1, K_i1) e(C_i2, K_i2) / e(C_0, K_0). Uses 1 + 2|J| pairings.
    Target decrypt(const Ciphertext<G>& ct, const Token<G>& tk) const {
        check_width(tk.pattern.width());
        if (ct.c1.size() != width_ || ct.c2.size() != width_) {
            throw ParameterError("ciphertext width differs from the scheme width");
        }
        Target acc = ct.c_prime;
        for (const auto& comp : tk.components) {
            acc = group_.target_mul(acc, group_.pair(ct.c1[comp.position], comp.k1));
            acc = group_.target_mul(acc, group_.pair(ct.c2[comp.position], comp.k2));
        }
        return group_.target_mul(acc, group_.target_inv(group_.pair(ct.c0, tk.k0)));
    }

    // The message if the ciphertext's index satisfies the token, otherwise nullopt (bottom).
    std::optional<Target> query(const Ciphertext<G>& ct, const Token<G>& tk,
                                const MessageDomain<G>& domain) const {
        const Target m = decrypt(ct, tk);
        if (!domain.contains(m)) return std::nullopt;
        return m;
    }

private:
    void check_width(std::size_t w) const {
        if (w != width_) {
            throw ParameterError("pattern width " + std::to_string(w) + " differs from HVE width " +
                                 std::to_string(width_));
        }
    }

    G group_;
    std::size_t width_;
};

using MockScheme = Scheme<MockPairingGroup>;
using MockKeyPair = KeyPair<MockPairingGroup>;
using MockPublicKey = PublicKey<MockPairingGroup>;
using MockSecretKey = SecretKey<MockPairingGroup>;
using MockCiphertext = Ciphertext<MockPairingGroup>;
using MockToken = Token<MockPairingGroup>;
using MockMessageDomain = MessageDomain<MockPairingGroup>;

}  // namespace geoalert::hve
