#pragma once
/// \file fusion.hpp
/// \brief Level-k fusion category data for the sl2 theories: quantum
///        integers, admissibility, theta/tetrahedral symbols, 6j recoupling,
///        braiding phases and modular (S, T) data — all exact.
///
/// Conventions.  Labels are twice-spins a = 0..k.  With r = k + 2 the
/// deformation parameter is q = zeta^2 where zeta = zeta_{4r} is the
/// primitive 4r-th root of unity, so q = exp(i*pi/r).  Quantum integers are
/// [n] = (q^n - q^{-n})/(q - q^{-1}) and quantum dimensions [d_a] = [a+1].
/// The ribbon twist is v_a = zeta^{a(a+2)}.  Recoupling uses the
/// theta-normalized (square-root-free) gauge: every 6j entry lies in
/// Q(zeta_{4r}).  Quantities involving the global normalization
/// D = sqrt(sum_a [d_a]^2) — the S-matrix and the Gauss sums Delta± —
/// live in the doubled field Q(zeta_{8r}).

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtqft/cyclotomic.hpp"

namespace qtqft {

struct LevelParams {
    int k = 1;       ///< level, k >= 1
    int r = 3;       ///< r = k + 2
    int order = 12;  ///< cyclotomic order 4r for category data
    int order2 = 24; ///< doubled order 8r for modular data
};

class FusionData {
  public:
    explicit FusionData(int level) : p_{level, level + 2, 4 * (level + 2), 8 * (level + 2)} {
        if (level < 1 || level > 24) throw std::invalid_argument("build_fusion_data: level must be in 1..24");
        build_tables();
        build_modular();
    }

    const LevelParams& params() const { return p_; }
    int level() const { return p_.k; }
    int rank() const { return p_.k + 1; }  ///< number of labels 0..k

    /// Fusion admissibility of the triple (a,b,c).
    bool admissible(int a, int b, int c) const {
        if (a < 0 || b < 0 || c < 0 || a > p_.k || b > p_.k || c > p_.k) return false;
        if ((a + b + c) % 2 != 0) return false;
        if (c < std::abs(a - b) || c > a + b) return false;
        return a + b + c <= 2 * p_.k;
    }
    int nmat(int a, int b, int c) const { return admissible(a, b, c) ? 1 : 0; }

    /// Quantum integer [n] in Q(zeta_{4r}); defined for all integers n.
    CycNum qint(int n) const {
        if (n < 0) return cyc_neg(qint(-n));
        if (n < static_cast<int>(qint_.size())) return qint_[static_cast<size_t>(n)];
        CycNum s = cyc_zero(p_.order);
        for (int i = 0; i < n; ++i) s = cyc_add(s, cyc_from_power(2L * (n - 1 - 2 * i), p_.order));
        return s;
    }
    /// Quantum dimension [d_a] = [a+1].
    const CycNum& qdim(int a) const { return qdim_.at(static_cast<size_t>(a)); }
    const CycNum& qdim_inv(int a) const { return qdim_inv_.at(static_cast<size_t>(a)); }

    /// Ribbon twist v_a = zeta^{a(a+2)} (order 4r).
    CycNum twist(int a) const { return cyc_from_power(static_cast<long>(a) * (a + 2), p_.order); }
    CycNum twist_inv(int a) const { return cyc_from_power(-static_cast<long>(a) * (a + 2), p_.order); }
    /// Square root of the twist, v_a^{±1/2} = zeta_{8r}^{±a(a+2)}.  For odd
    /// labels this genuinely lives in the doubled field, hence order 8r.
    CycNum twist_sqrt(int a, int sign) const {
        long e = static_cast<long>(a) * (a + 2);
        return cyc_from_power(sign >= 0 ? e : -e, p_.order2);
    }

    /// Braiding eigenvalue ratio lambda(a,b;c) = v_c / (v_a v_b) (order 4r).
    CycNum lambda(int a, int b, int c) const {
        long e = static_cast<long>(c) * (c + 2) - static_cast<long>(a) * (a + 2) - static_cast<long>(b) * (b + 2);
        return cyc_from_power(e, p_.order);
    }
    /// Signed half-monodromy: the eigenvalue of the braiding on channel c,
    ///   lambda_sqrt(a,b,c,+1) = (-1)^{(a+b-c)/2} * zeta^{(c(c+2)-a(a+2)-b(b+2))/2}.
    /// The exponent is an integer for admissible triples, so the value stays
    /// in Q(zeta_{4r}).  sign = -1 gives the inverse braiding eigenvalue.
    CycNum lambda_sqrt(int a, int b, int c, int sign) const {
        if (!admissible(a, b, c)) throw std::invalid_argument("lambda_sqrt: inadmissible triple");
        long e2 = static_cast<long>(c) * (c + 2) - static_cast<long>(a) * (a + 2) - static_cast<long>(b) * (b + 2);
        if (e2 % 2 != 0) throw std::logic_error("lambda_sqrt: odd exponent on admissible triple");
        CycNum val = cyc_from_power((sign >= 0 ? e2 : -e2) / 2, p_.order);
        return ((a + b - c) / 2) % 2 != 0 ? cyc_neg(val) : val;
    }

    /// Theta network theta(a,b,c) (vertex normalization of the gauge).
    CycNum theta(int a, int b, int c) const {
        if (!admissible(a, b, c)) throw std::invalid_argument("theta: inadmissible triple");
        int m = (a + b - c) / 2, n = (b + c - a) / 2, pp = (c + a - b) / 2;
        CycNum num = cyc_mul(qfact(m + n + pp + 1), cyc_mul(qfact(m), cyc_mul(qfact(n), qfact(pp))));
        CycNum den = cyc_mul(qfact(m + n), cyc_mul(qfact(n + pp), qfact(pp + m)));
        return cyc_mul(num, cyc_inv(den));
    }

    /// Tetrahedral network Tet[a b e; c d f] with triads (a,b,e), (e,c,d),
    /// (b,c,f), (a,f,d); evaluated by the classical single-sum formula,
    /// sign-adjusted to the unsigned-loop gauge (loop value +[n+1], so e.g.
    /// a zero edge collapses to +theta of the surviving triangle).
    CycNum tet(int a, int b, int e, int c, int d, int f) const {
        if (!(admissible(a, b, e) && admissible(e, c, d) && admissible(b, c, f) && admissible(a, f, d)))
            throw std::invalid_argument("tet: inadmissible labelling");
        // Triad half-sums and square half-sums.
        const int A[4] = {(a + b + e) / 2, (e + c + d) / 2, (b + c + f) / 2, (a + f + d) / 2};
        const int B[3] = {(a + b + c + d) / 2, (b + e + d + f) / 2, (a + e + c + f) / 2};
        const int lo = *std::max_element(A, A + 4);
        const int hi = *std::min_element(B, B + 3);
        // Parity of the factorial sign twist: replacing the signed-gauge
        // [n] = (-1)^{n+1}[n]_+ makes [n]! pick up (-1)^{n(n+3)/2}, which is
        // odd exactly for n = 2, 3 (mod 4).
        auto fp = [](int m) { return (m % 4) >= 2 ? 1 : 0; };
        int base_par = 0;
        CycNum interior = cyc_one(p_.order);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) {
                interior = cyc_mul(interior, qfact(B[j] - A[i]));
                base_par ^= fp(B[j] - A[i]) & 1;
            }
        CycNum edges = cyc_one(p_.order);
        for (int x : {a, b, c, d, e, f}) {
            edges = cyc_mul(edges, qfact(x));
            base_par ^= fp(x) & 1;
        }
        CycNum sum = cyc_zero(p_.order);
        for (int s = lo; s <= hi; ++s) {
            if (s + 1 >= p_.r) continue;  // [s+1]! vanishes at the root of unity
            CycNum term = qfact(s + 1);
            CycNum den = cyc_one(p_.order);
            int par = (s & 1) ^ (fp(s + 1) & 1);
            for (int i = 0; i < 4; ++i) {
                den = cyc_mul(den, qfact(s - A[i]));
                par ^= fp(s - A[i]) & 1;
            }
            for (int j = 0; j < 3; ++j) {
                den = cyc_mul(den, qfact(B[j] - s));
                par ^= fp(B[j] - s) & 1;
            }
            term = cyc_mul(term, cyc_inv(den));
            sum = par != 0 ? cyc_sub(sum, term) : cyc_add(sum, term);
        }
        CycNum out = cyc_mul(cyc_mul(interior, cyc_inv(edges)), sum);
        return base_par != 0 ? cyc_neg(out) : out;
    }

    /// 6j recoupling coefficient in the theta-normalized gauge: the matrix
    /// element of the associator move ((a b) c -> a (b c)) from the channel
    /// e = (ab) to the channel f = (bc), with total d-leg context:
    ///   sixj(a,b,e; c,d,f) = Tet[a b e; c d f] * [d_f] / (theta(b,c,f) theta(a,f,d)).
    CycNum sixj(int a, int b, int e, int c, int d, int f) const {
        CycNum t = tet(a, b, e, c, d, f);
        return cyc_mul(cyc_mul(t, qdim(f)), cyc_inv(cyc_mul(theta(b, c, f), theta(a, f, d))));
    }
    /// Closed-form inverse matrix element (same tetrahedron, transposed
    /// normalization): sixj_inv(f -> e) for the move a (b c) -> (a b) c.
    CycNum sixj_inv(int a, int b, int e, int c, int d, int f) const {
        CycNum t = tet(a, b, e, c, d, f);
        return cyc_mul(cyc_mul(t, qdim(e)), cyc_inv(cyc_mul(theta(a, b, e), theta(e, c, d))));
    }

    /// All c with N^{ab}_c = 1, in increasing order.
    std::vector<int> fusion_range(int a, int b) const {
        std::vector<int> out;
        for (int c = 0; c <= p_.k; ++c)
            if (admissible(a, b, c)) out.push_back(c);
        return out;
    }

    // ----- modular data (order 8r) -----

    /// Unnormalized S-matrix: S~_{ab} = sum_c N^{ab}_c [d_c] v_c/(v_a v_b), order 4r.
    const std::vector<std::vector<CycNum>>& smatrix_unnorm() const { return s_unnorm_; }
    /// Normalized S = S~/D (order 8r); exactly involutive, S^2 = id.
    const std::vector<std::vector<CycNum>>& smatrix() const { return s_; }
    /// T = diag(v_a) as order-8r values.
    const std::vector<CycNum>& tdiag() const { return t_; }
    /// Total dimension D = sqrt(sum [d_a]^2) > 0, exact in Q(zeta_{8r}).
    const CycNum& total_dim() const { return dtot_; }
    const CycNum& total_dim_inv() const { return dtot_inv_; }
    /// D^2 in the base order 4r.
    const CycNum& global_dim_sq() const { return d2_; }
    /// Gauss sums Delta± = sum_a [d_a]^2 v_a^{±1} (order 8r).
    const CycNum& delta_plus() const { return delta_plus_; }
    const CycNum& delta_minus() const { return delta_minus_; }

    int order() const { return p_.order; }
    int order2() const { return p_.order2; }

    /// [n]! with [m] = 0 allowed for m >= r (then the factorial is zero).
    CycNum qfact(int n) const {
        if (n < 0) throw std::invalid_argument("qfact: negative argument");
        if (n < static_cast<int>(qfact_.size())) return qfact_[static_cast<size_t>(n)];
        CycNum acc = qfact_.back();
        for (int m = static_cast<int>(qfact_.size()); m <= n; ++m) acc = cyc_mul(acc, qint(m));
        return acc;
    }

  private:
    void build_tables() {
        const int n = p_.order;
        qint_.reserve(static_cast<size_t>(2 * p_.r + 2));
        for (int m = 0; m <= 2 * p_.r + 1; ++m) {
            CycNum s = cyc_zero(n);
            for (int i = 0; i < m; ++i) s = cyc_add(s, cyc_from_power(2L * (m - 1 - 2 * i), n));
            qint_.push_back(s);
        }
        qfact_.push_back(cyc_one(n));
        for (int m = 1; m <= 2 * p_.r + 1; ++m) qfact_.push_back(cyc_mul(qfact_.back(), qint_[static_cast<size_t>(m)]));
        for (int a = 0; a <= p_.k; ++a) {
            qdim_.push_back(qint_[static_cast<size_t>(a + 1)]);
            qdim_inv_.push_back(cyc_inv(qdim_.back()));
        }
        d2_ = cyc_zero(n);
        for (int a = 0; a <= p_.k; ++a) d2_ = cyc_add(d2_, cyc_mul(qdim(a), qdim(a)));
    }

    void build_modular() {
        const int n = p_.order, n2 = p_.order2, k = p_.k;
        // S~ in the base field.
        s_unnorm_.assign(static_cast<size_t>(k + 1), std::vector<CycNum>(static_cast<size_t>(k + 1), cyc_zero(n)));
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b) {
                CycNum acc = cyc_zero(n);
                for (int c : fusion_range(a, b)) acc = cyc_add(acc, cyc_mul(qdim(c), lambda(a, b, c)));
                s_unnorm_[static_cast<size_t>(a)][static_cast<size_t>(b)] = acc;
            }

        // Exact positive square root of D^2 = r / (2 sin^2(pi/r)) in Q(zeta_{8r}):
        // D = sqrt(2r) * i / (q - q^{-1}) with q = zeta_{8r}^4, i = zeta_{8r}^{2r},
        // sqrt(2) = zeta_8 + zeta_8^{-1}, and sqrt(m) for the odd part m of 2r
        // built from the quadratic Gauss sum.
        long two_r = 2L * p_.r;
        int e2 = 0;
        long m_odd = two_r;
        while (m_odd % 2 == 0) {
            m_odd /= 2;
            ++e2;
        }
        CycNum root = cyc_one(n2);
        CycNum sqrt2 = cyc_add(cyc_from_power(p_.r, n2), cyc_from_power(-p_.r, n2));  // zeta_8 ± at order 8r
        for (int t = 0; t < e2; ++t) root = cyc_mul(root, sqrt2);
        if (m_odd > 1) {
            CycNum gauss = cyc_zero(n2);
            long step = (8L * p_.r) / m_odd;
            for (long t = 0; t < m_odd; ++t) gauss = cyc_add(gauss, cyc_from_power((t * t % m_odd) * step, n2));
            if (m_odd % 4 == 3) {
                // gauss = i*sqrt(m); divide by i.
                gauss = cyc_mul(gauss, cyc_from_power(-2L * p_.r, n2));
            }
            root = cyc_mul(root, gauss);
        }
        CycNum qq = cyc_sub(cyc_from_power(4, n2), cyc_from_power(-4, n2));  // q - q^{-1} at order 8r
        dtot_ = cyc_mul(cyc_mul(root, cyc_from_power(2L * p_.r, n2)), cyc_inv(qq));
        if (cyc_to_float(dtot_) < 0) dtot_ = cyc_neg(dtot_);
        CycNum d2_lift = cyc_lift(d2_, n2);
        if (!(cyc_mul(dtot_, dtot_) == d2_lift)) throw std::logic_error("modular_data: D^2 mismatch");
        if (std::abs(cyc_to_complex(dtot_).imag()) > 1e-9 || cyc_to_float(dtot_) <= 0)
            throw std::logic_error("modular_data: D not real positive");
        dtot_inv_ = cyc_inv(dtot_);

        s_.assign(static_cast<size_t>(k + 1), std::vector<CycNum>(static_cast<size_t>(k + 1), cyc_zero(n2)));
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b)
                s_[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                    cyc_mul(cyc_lift(s_unnorm_[static_cast<size_t>(a)][static_cast<size_t>(b)], n2), dtot_inv_);

        t_.clear();
        for (int a = 0; a <= k; ++a) t_.push_back(cyc_lift(twist(a), n2));

        delta_plus_ = cyc_zero(n2);
        delta_minus_ = cyc_zero(n2);
        for (int a = 0; a <= k; ++a) {
            CycNum d2a = cyc_lift(cyc_mul(qdim(a), qdim(a)), n2);
            delta_plus_ = cyc_add(delta_plus_, cyc_mul(d2a, cyc_lift(twist(a), n2)));
            delta_minus_ = cyc_add(delta_minus_, cyc_mul(d2a, cyc_lift(twist_inv(a), n2)));
        }

        verify_modular();
    }

    void verify_modular() {
        const int k = p_.k, n2 = p_.order2;
        // Symmetry and exact involutivity S^2 = C = id (all labels self-dual).
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b) {
                if (!(s_[static_cast<size_t>(a)][static_cast<size_t>(b)] == s_[static_cast<size_t>(b)][static_cast<size_t>(a)]))
                    throw std::logic_error("modular_data: S not symmetric");
            }
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b) {
                CycNum acc = cyc_zero(n2);
                for (int c = 0; c <= k; ++c)
                    acc = cyc_add(acc, cyc_mul(s_[static_cast<size_t>(a)][static_cast<size_t>(c)],
                                               s_[static_cast<size_t>(c)][static_cast<size_t>(b)]));
                CycNum expect = (a == b) ? cyc_one(n2) : cyc_zero(n2);
                if (!(acc == expect)) throw std::logic_error("modular_data: S^2 != id");
            }
        // Numerical unitarity S S^dagger = id.
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b) {
                std::complex<double> acc(0, 0);
                for (int c = 0; c <= k; ++c)
                    acc += cyc_to_complex(s_[static_cast<size_t>(a)][static_cast<size_t>(c)]) *
                           std::conj(cyc_to_complex(s_[static_cast<size_t>(b)][static_cast<size_t>(c)]));
                double expect = (a == b) ? 1.0 : 0.0;
                if (std::abs(acc - std::complex<double>(expect, 0)) > 1e-9)
                    throw std::logic_error("modular_data: S not unitary numerically");
            }
        // Gauss sum identities: Delta+ Delta- = D^2 and Delta+/D = zeta_{8r}^{3k}.
        if (!(cyc_mul(delta_plus_, delta_minus_) == cyc_lift(d2_, n2)))
            throw std::logic_error("modular_data: Delta+ Delta- != D^2");
        if (!(delta_plus_ == cyc_mul(dtot_, cyc_from_power(3L * k, n2))))
            throw std::logic_error("modular_data: central charge anomaly mismatch");
        // Verlinde: sum_c N^{a}_{bc} S_{cd} = (S_{ad}/S_{0d}) S_{bd} exactly.
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b)
                for (int d = 0; d <= k; ++d) {
                    CycNum lhs = cyc_zero(n2);
                    for (int c = 0; c <= k; ++c)
                        if (admissible(a, b, c))
                            lhs = cyc_add(lhs, s_[static_cast<size_t>(c)][static_cast<size_t>(d)]);
                    CycNum ratio = cyc_mul(s_[static_cast<size_t>(a)][static_cast<size_t>(d)],
                                           cyc_inv(s_[0][static_cast<size_t>(d)]));
                    CycNum rhs = cyc_mul(ratio, s_[static_cast<size_t>(b)][static_cast<size_t>(d)]);
                    if (!(lhs == rhs)) throw std::logic_error("modular_data: Verlinde identity failed");
                }
    }

    LevelParams p_;
    std::vector<CycNum> qint_, qfact_, qdim_, qdim_inv_;
    CycNum d2_;
    std::vector<std::vector<CycNum>> s_unnorm_, s_;
    std::vector<CycNum> t_;
    CycNum dtot_, dtot_inv_, delta_plus_, delta_minus_;
};

/// Free-function constructor.
inline FusionData build_fusion_data(int level) { return FusionData(level); }

}  // namespace qtqft
