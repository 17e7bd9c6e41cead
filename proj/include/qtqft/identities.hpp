#pragma once
/// \file identities.hpp
/// \brief Consistency identities of the fusion and modular data, packaged as
/// callable suites.
///
/// Each suite walks every instance of one identity at the given level, returns
/// the number of elementary equalities it verified, and throws IdentityError
/// naming the offending label tuple on the first failure.  The suites are the
/// backbone of the `verify` command and of the integration gate, so they never
/// assume the identity holds: every comparison is an exact CycNum equality.

#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qtqft/cyclotomic.hpp"
#include "qtqft/fusion.hpp"

namespace qtqft {

/// Thrown by an identity suite on its first failed equality; the message names
/// the suite and the offending labels.
class IdentityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Memoized 6j lookup; the raw accessor recomputes the q-factorial sums on
/// every call, which the pentagon sweep cannot afford.
struct SixjMemo {
    const FusionData& fd;
    std::map<std::tuple<int, int, int, int, int, int>, CycNum> mem;
    const CycNum& get(int a, int b, int e, int c, int d, int f) {
        auto key = std::make_tuple(a, b, e, c, d, f);
        auto it = mem.find(key);
        if (it == mem.end()) it = mem.emplace(key, fd.sixj(a, b, e, c, d, f)).first;
        return it->second;
    }
};

inline std::string label_tuple(std::initializer_list<int> xs) {
    std::string s = "(";
    bool first = true;
    for (int x : xs) {
        if (!first) s += ",";
        s += std::to_string(x);
        first = false;
    }
    return s + ")";
}

[[noreturn]] inline void identity_fail(const std::string& suite, std::initializer_list<int> labels) {
    throw IdentityError(suite + " failed at labels " + label_tuple(labels));
}

}  // namespace detail

/// Pentagon identity for the 6j symbols, swept over every tuple
/// (a,b,c,d,e;x,y,u,w) whose two recoupling routes are both admissible.
inline long check_pentagon(const FusionData& fd) {
    const int k = fd.level();
    detail::SixjMemo sj{fd, {}};
    long checks = 0;
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b)
            for (int c = 0; c <= k; ++c)
                for (int d = 0; d <= k; ++d)
                    for (int e = 0; e <= k; ++e)
                        for (int x = 0; x <= k; ++x) {
                            if (!fd.admissible(a, b, x)) continue;
                            for (int y = 0; y <= k; ++y) {
                                if (!(fd.admissible(x, c, y) && fd.admissible(y, d, e))) continue;
                                for (int u = 0; u <= k; ++u) {
                                    if (!fd.admissible(c, d, u)) continue;
                                    for (int w = 0; w <= k; ++w) {
                                        if (!(fd.admissible(b, u, w) && fd.admissible(a, w, e)))
                                            continue;
                                        CycNum lhs = cyc_zero(fd.order());
                                        if (fd.admissible(x, u, e))
                                            lhs = cyc_mul(sj.get(x, c, y, d, e, u),
                                                          sj.get(a, b, x, u, e, w));
                                        CycNum rhs = cyc_zero(fd.order());
                                        for (int g = 0; g <= k; ++g) {
                                            if (!(fd.admissible(b, c, g) && fd.admissible(a, g, y) &&
                                                  fd.admissible(g, d, w)))
                                                continue;
                                            rhs = cyc_add(
                                                rhs, cyc_mul(sj.get(a, b, x, c, y, g),
                                                             cyc_mul(sj.get(a, g, y, d, e, w),
                                                                     sj.get(b, c, g, d, w, u))));
                                        }
                                        if (!(lhs == rhs))
                                            detail::identity_fail("pentagon",
                                                                  {a, b, c, d, e, x, y, u, w});
                                        ++checks;
                                    }
                                }
                            }
                        }
    return checks;
}

/// Orthogonality of the 6j matrix against its closed-form inverse: for each
/// frame (a,b,c,d), sum_f {6j}(..e1..f) {6j}^{-1}(..e2..f) = delta_{e1,e2}.
inline long check_sixj_orthogonality(const FusionData& fd) {
    const int k = fd.level();
    long checks = 0;
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b)
            for (int c = 0; c <= k; ++c)
                for (int d = 0; d <= k; ++d) {
                    std::vector<int> es, fs;
                    for (int e = 0; e <= k; ++e)
                        if (fd.admissible(a, b, e) && fd.admissible(e, c, d)) es.push_back(e);
                    for (int f = 0; f <= k; ++f)
                        if (fd.admissible(b, c, f) && fd.admissible(a, f, d)) fs.push_back(f);
                    if (es.size() != fs.size()) detail::identity_fail("6j-orthogonality", {a, b, c, d});
                    for (int e1 : es)
                        for (int e2 : es) {
                            CycNum acc = cyc_zero(fd.order());
                            for (int f : fs)
                                acc = cyc_add(acc, cyc_mul(fd.sixj(a, b, e1, c, d, f),
                                                           fd.sixj_inv(a, b, e2, c, d, f)));
                            CycNum expect = e1 == e2 ? cyc_one(fd.order()) : cyc_zero(fd.order());
                            if (!(acc == expect))
                                detail::identity_fail("6j-orthogonality", {a, b, c, d, e1, e2});
                            ++checks;
                        }
                }
    return checks;
}

/// Character identity of the quantum dimensions:
/// [d_a][d_b] = sum_c N^{ab}_c [d_c].
inline long check_character_identity(const FusionData& fd) {
    const int k = fd.level();
    long checks = 0;
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b) {
            CycNum rhs = cyc_zero(fd.order());
            for (int c : fd.fusion_range(a, b)) rhs = cyc_add(rhs, fd.qdim(c));
            if (!(cyc_mul(fd.qdim(a), fd.qdim(b)) == rhs))
                detail::identity_fail("character", {a, b});
            ++checks;
        }
    return checks;
}

/// Projector normalization: sum_{a,b} [d_a][d_b] N^{ab}_c = D^2 [d_c].
inline long check_projector_identity(const FusionData& fd) {
    const int k = fd.level();
    long checks = 0;
    for (int c = 0; c <= k; ++c) {
        CycNum lhs = cyc_zero(fd.order());
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b)
                if (fd.admissible(a, b, c)) lhs = cyc_add(lhs, cyc_mul(fd.qdim(a), fd.qdim(b)));
        if (!(lhs == cyc_mul(fd.global_dim_sq(), fd.qdim(c)))) detail::identity_fail("projector", {c});
        ++checks;
    }
    return checks;
}

/// Unitarity of the normalized S-matrix: sum_b S_{ab} conj(S_{cb}) = delta_{ac}.
inline long check_s_unitarity(const FusionData& fd) {
    const int k = fd.level();
    const auto& S = fd.smatrix();
    const int n2 = fd.order2();
    long checks = 0;
    for (int a = 0; a <= k; ++a)
        for (int c = 0; c <= k; ++c) {
            CycNum acc = cyc_zero(n2);
            for (int b = 0; b <= k; ++b)
                acc = cyc_add(acc, cyc_mul(S[static_cast<size_t>(a)][static_cast<size_t>(b)],
                                           cyc_conj(S[static_cast<size_t>(c)][static_cast<size_t>(b)])));
            CycNum expect = a == c ? cyc_one(n2) : cyc_zero(n2);
            if (!(acc == expect)) detail::identity_fail("s-unitarity", {a, c});
            ++checks;
        }
    return checks;
}

/// Verlinde formula: N^{ab}_c = sum_x S_{ax} S_{bx} conj(S_{cx}) / S_{0x}.
inline long check_verlinde(const FusionData& fd) {
    const int k = fd.level();
    const auto& S = fd.smatrix();
    const int n2 = fd.order2();
    long checks = 0;
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b)
            for (int c = 0; c <= k; ++c) {
                CycNum acc = cyc_zero(n2);
                for (int x = 0; x <= k; ++x) {
                    CycNum term = cyc_mul(S[static_cast<size_t>(a)][static_cast<size_t>(x)],
                                          S[static_cast<size_t>(b)][static_cast<size_t>(x)]);
                    term = cyc_mul(term, cyc_conj(S[static_cast<size_t>(c)][static_cast<size_t>(x)]));
                    term = cyc_mul(term, cyc_inv(S[0][static_cast<size_t>(x)]));
                    acc = cyc_add(acc, term);
                }
                if (!(acc == cyc_rational(Rational(fd.nmat(a, b, c)), n2)))
                    detail::identity_fail("verlinde", {a, b, c});
                ++checks;
            }
    return checks;
}

/// The named suites in report order.
struct IdentitySuite {
    const char* name;
    long (*run)(const FusionData&);
};

inline const std::vector<IdentitySuite>& identity_suites() {
    static const std::vector<IdentitySuite> suites = {
        {"pentagon", &check_pentagon},
        {"6j-orthogonality", &check_sixj_orthogonality},
        {"character", &check_character_identity},
        {"projector", &check_projector_identity},
        {"s-unitarity", &check_s_unitarity},
        {"verlinde", &check_verlinde},
    };
    return suites;
}

}  // namespace qtqft
