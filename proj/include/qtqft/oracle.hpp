#pragma once
/// \file oracle.hpp
/// \brief Independent cross-checks from quantum-group representation theory.
///
/// Everything here is computed from first principles — generator matrices of
/// U_q(sl2) on weight bases, highest-weight Clebsch-Gordan chains, the
/// truncated universal R-matrix, and a Temperley-Lieb state-sum Kauffman
/// bracket — deliberately *without* reusing the recoupling machinery, so the
/// two pipelines can be compared against each other.
///
/// Scope: irreducibles V_a for twice-spins a <= 3 stay generic at every level
/// k >= 1 treated here (all q-factorials involved are nonzero), which is the
/// regime the cross-checks run in.

#include <map>
#include <stdexcept>
#include <vector>

#include "qtqft/cyclotomic.hpp"
#include "qtqft/fusion.hpp"

namespace qtqft {
namespace oracle {

/// Tensor-product vectors are stored dense: w[i][j] multiplies v_i (x) v_j,
/// where v_0..v_a is the weight basis of V_a with K v_i = q^{a-2i} v_i,
/// E v_i = [a-i+1] v_{i-1}, F v_i = [i+1] v_{i+1}.
using TensorVec = std::vector<std::vector<CycNum>>;

class RepOracle {
  public:
    explicit RepOracle(int level) : fd_(level) {}

    const FusionData& fusion() const { return fd_; }
    int order() const { return fd_.order(); }

    /// Highest-weight Clebsch-Gordan chain for the channel c inside
    /// V_a (x) V_b: coefficients x_i on v_i (x) v_{t-i}, t = (a+b-c)/2,
    /// running over the allowed i range, normalized so the first entry is 1.
    /// Derived from the single highest-weight recurrence; the full
    /// Delta(E)-annihilation is asserted.
    std::vector<CycNum> cg_coefficients(int a, int b, int c) const {
        check_labels(a, b);
        if ((a + b - c) % 2 != 0 || c < std::abs(a - b) || c > a + b)
            throw std::invalid_argument("cg_coefficients: channel outside the classical range");
        const int n = order();
        const int t = (a + b - c) / 2;
        const int i_lo = std::max(0, t - b), i_hi = std::min(a, t);
        std::vector<CycNum> x(static_cast<size_t>(i_hi - i_lo + 1), cyc_zero(n));
        x[0] = cyc_one(n);
        // Delta(E) = E (x) 1 + K (x) E annihilates the vector; the component
        // at v_i (x) v_{t-1-i} couples x_i and x_{i+1}:
        //   x_{i+1} [a-i] + x_i q^{a-2i} [b-(t-1-i)] = 0.
        for (int i = i_lo; i < i_hi; ++i) {
            CycNum num = cyc_mul(cyc_from_power(2L * (a - 2 * i), n), fd_.qint(b - (t - 1 - i)));
            CycNum den = fd_.qint(a - i);
            if (den.is_zero()) throw std::logic_error("cg_coefficients: vanishing q-integer in recurrence");
            x[static_cast<size_t>(i - i_lo + 1)] =
                cyc_neg(cyc_mul(x[static_cast<size_t>(i - i_lo)], cyc_mul(num, cyc_inv(den))));
        }
        // Belt and braces: verify annihilation on every component.
        TensorVec w = make_tensor(a, b);
        for (int i = i_lo; i <= i_hi; ++i) w[static_cast<size_t>(i)][static_cast<size_t>(t - i)] = x[static_cast<size_t>(i - i_lo)];
        TensorVec ew = coproduct_e(a, b, w);
        for (const auto& row : ew)
            for (const auto& v : row)
                if (!v.is_zero()) throw std::logic_error("cg_coefficients: highest-weight check failed");
        return x;
    }

    /// Eigenvalue of the braiding (flip composed with the R-matrix) on the
    /// channel c of V_a (x) V_a.  sign = -1 gives the inverse braiding.
    CycNum braid_eigen(int a, int c, int sign = +1) const {
        TensorVec w = cg_vector(a, a, c);
        TensorVec rw = apply_braiding(a, a, w, sign);
        return proportionality(rw, w, "braid_eigen");
    }

    /// Eigenvalue of the full monodromy (PR)^2 on the channel c of
    /// V_a (x) V_b — gauge-free also for a != b.
    CycNum monodromy_eigen(int a, int b, int c) const {
        TensorVec w = cg_vector(a, b, c);
        TensorVec m = apply_braiding(b, a, apply_braiding(a, b, w, +1), +1);
        return proportionality(m, w, "monodromy_eigen");
    }

    // ----- Kauffman bracket -----

    /// Planar tangle events for the bracket evaluator.  Positions are
    /// 1-based among the current strand endpoints.
    struct TangleEvent {
        enum Kind { Cup, Cap, CrossPos, CrossNeg } kind;
        int pos;
    };

    /// Kauffman bracket of a closed spin-1/2 diagram given as a Morse event
    /// list, with bracket variable A = i * zeta^{-1} (so the loop value is
    /// +[2]).  The empty diagram evaluates to 1; a single unknot to [2].
    /// Refuses diagrams with more than `max_crossings` crossings.
    CycNum kauffman_bracket(const std::vector<TangleEvent>& events, int max_crossings = 12) const {
        const int n = order();
        const long r = fd_.params().r;
        const CycNum A = cyc_from_power(r - 1, n);       // i * zeta^{-1}
        const CycNum Ainv = cyc_from_power(1 - r, n);
        const CycNum loop = fd_.qint(2);
        int crossings = 0;
        for (const auto& ev : events)
            if (ev.kind == TangleEvent::CrossPos || ev.kind == TangleEvent::CrossNeg) ++crossings;
        if (crossings > max_crossings)
            throw std::invalid_argument("kauffman_bracket: too many crossings");

        // State: noncrossing pairings of the open endpoints, as partner
        // arrays (0-based), mapped to amplitudes.
        using Pairing = std::vector<int>;
        std::map<Pairing, CycNum> states;
        states.emplace(Pairing{}, cyc_one(n));
        auto add_to = [&](std::map<Pairing, CycNum>& m, const Pairing& p, const CycNum& amp) {
            auto it = m.find(p);
            if (it == m.end())
                m.emplace(p, amp);
            else
                it->second = cyc_add(it->second, amp);
        };
        auto do_cup = [&](const Pairing& p, int at) {  // insert partners (at, at+1)
            Pairing q(p.size() + 2);
            for (size_t i = 0; i < p.size(); ++i) {
                int v = p[i];
                if (v >= at) v += 2;
                size_t ni = i >= static_cast<size_t>(at) ? i + 2 : i;
                q[ni] = v;
            }
            q[static_cast<size_t>(at)] = at + 1;
            q[static_cast<size_t>(at + 1)] = at;
            return q;
        };
        // Join endpoints at, at+1; returns {pairing, closed-loop?}.
        auto do_cap = [&](const Pairing& p, int at, bool& closed) {
            int pa = p[static_cast<size_t>(at)], pb = p[static_cast<size_t>(at + 1)];
            closed = (pa == at + 1);
            Pairing q;
            q.reserve(p.size() - 2);
            auto shift = [&](int v) { return v > at + 1 ? v - 2 : v; };
            for (size_t i = 0; i < p.size(); ++i) {
                if (i == static_cast<size_t>(at) || i == static_cast<size_t>(at + 1)) continue;
                int v = p[i];
                if (!closed) {
                    if (static_cast<int>(i) == pa) v = pb;      // reconnect the two far ends
                    else if (static_cast<int>(i) == pb) v = pa;
                }
                q.push_back(shift(v));
            }
            return q;
        };

        for (const auto& ev : events) {
            std::map<Pairing, CycNum> next;
            for (const auto& [p, amp] : states) {
                const int at = ev.pos - 1;
                switch (ev.kind) {
                    case TangleEvent::Cup: {
                        if (at < 0 || at > static_cast<int>(p.size()))
                            throw std::invalid_argument("kauffman_bracket: cup position out of range");
                        add_to(next, do_cup(p, at), amp);
                        break;
                    }
                    case TangleEvent::Cap: {
                        if (at < 0 || at + 1 >= static_cast<int>(p.size()))
                            throw std::invalid_argument("kauffman_bracket: cap position out of range");
                        bool closed = false;
                        Pairing q = do_cap(p, at, closed);
                        add_to(next, q, closed ? cyc_mul(amp, loop) : amp);
                        break;
                    }
                    case TangleEvent::CrossPos:
                    case TangleEvent::CrossNeg: {
                        if (at < 0 || at + 1 >= static_cast<int>(p.size()))
                            throw std::invalid_argument("kauffman_bracket: crossing position out of range");
                        const bool positive = ev.kind == TangleEvent::CrossPos;
                        // identity smoothing
                        add_to(next, p, cyc_mul(amp, positive ? A : Ainv));
                        // turnback smoothing: cap then cup at the same spot
                        bool closed = false;
                        Pairing q = do_cap(p, at, closed);
                        q = do_cup(q, at);
                        CycNum w = cyc_mul(amp, positive ? Ainv : A);
                        add_to(next, q, closed ? cyc_mul(w, loop) : w);
                        break;
                    }
                }
            }
            states = std::move(next);
        }
        CycNum result = cyc_zero(n);
        for (const auto& [p, amp] : states) {
            if (!p.empty()) throw std::invalid_argument("kauffman_bracket: diagram not closed");
            result = cyc_add(result, amp);
        }
        return result;
    }

    /// Kink factor of the bracket: a positive curl multiplies by -A^3.
    CycNum bracket_kink(int sign) const {
        const long r = fd_.params().r;
        CycNum a3 = cyc_from_power(sign >= 0 ? 3 * (r - 1) : -3 * (r - 1), order());
        return cyc_neg(a3);
    }

  private:
    void check_labels(int a, int b) const {
        if (a < 0 || b < 0 || a > 3 || b > 3)
            throw std::invalid_argument("oracle: twice-spin out of supported range 0..3");
        if (a > fd_.level() || b > fd_.level())
            throw std::invalid_argument("oracle: label exceeds level");
    }

    TensorVec make_tensor(int a, int b) const {
        return TensorVec(static_cast<size_t>(a + 1),
                         std::vector<CycNum>(static_cast<size_t>(b + 1), cyc_zero(order())));
    }

    TensorVec cg_vector(int a, int b, int c) const {
        std::vector<CycNum> x = cg_coefficients(a, b, c);
        const int t = (a + b - c) / 2;
        const int i_lo = std::max(0, t - b);
        TensorVec w = make_tensor(a, b);
        for (size_t m = 0; m < x.size(); ++m)
            w[static_cast<size_t>(i_lo + static_cast<int>(m))]
             [static_cast<size_t>(t - i_lo - static_cast<int>(m))] = x[m];
        return w;
    }

    /// Delta(E) = E (x) 1 + K (x) E applied to a tensor vector on V_a (x) V_b.
    TensorVec coproduct_e(int a, int b, const TensorVec& w) const {
        const int n = order();
        TensorVec out = make_tensor(a, b);
        for (int i = 0; i <= a; ++i)
            for (int j = 0; j <= b; ++j) {
                const CycNum& x = w[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (x.is_zero()) continue;
                if (i > 0)
                    out[static_cast<size_t>(i - 1)][static_cast<size_t>(j)] =
                        cyc_add(out[static_cast<size_t>(i - 1)][static_cast<size_t>(j)],
                                cyc_mul(x, fd_.qint(a - i + 1)));
                if (j > 0)
                    out[static_cast<size_t>(i)][static_cast<size_t>(j - 1)] =
                        cyc_add(out[static_cast<size_t>(i)][static_cast<size_t>(j - 1)],
                                cyc_mul(x, cyc_mul(cyc_from_power(2L * (a - 2 * i), n), fd_.qint(b - j + 1))));
            }
        return out;
    }

    /// Braiding V_a (x) V_b -> V_b (x) V_a.  The positive braiding is
    /// P o R with R = q^{H(x)H/2} * sum_n c_n (F^n (x) E^n),
    /// c_n = q^{n(n-1)/2} (q - q^{-1})^n / [n]!  (the series truncates at
    /// n = min(a,b) and all its q-factorials are nonzero in the supported
    /// spin range).  sign = -1 applies the exact two-sided inverse
    /// (P o R_{ba})^{-1} = R_{ba}^{-1} o P, with
    /// R^{-1} = (sum_n (-1)^n q^{-n(n-1)/2} (q-q^{-1})^n/[n]! F^n (x) E^n) q^{-H(x)H/2}.
    TensorVec apply_braiding(int a, int b, const TensorVec& w, int sign) const {
        if (sign >= 0) {
            TensorVec acc = nilpotent_series(a, b, w, +1);
            cartan(a, b, acc, +1);
            return flip(a, b, acc);
        }
        TensorVec x = flip(a, b, w);  // now lives on V_b (x) V_a
        cartan(b, a, x, -1);
        return nilpotent_series(b, a, x, -1);
    }

    /// Transpose the tensor factors: V_a (x) V_b -> V_b (x) V_a.
    TensorVec flip(int a, int b, const TensorVec& w) const {
        TensorVec out(static_cast<size_t>(b + 1),
                      std::vector<CycNum>(static_cast<size_t>(a + 1), cyc_zero(order())));
        for (int i = 0; i <= a; ++i)
            for (int j = 0; j <= b; ++j)
                out[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                    w[static_cast<size_t>(i)][static_cast<size_t>(j)];
        return out;
    }

    /// Componentwise q^{±(weight) (weight')/2} = zeta^{±(a-2i)(b-2j)}.
    void cartan(int a, int b, TensorVec& w, int sign) const {
        const int n = order();
        for (int i = 0; i <= a; ++i)
            for (int j = 0; j <= b; ++j) {
                CycNum& x = w[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (x.is_zero()) continue;
                long mm = static_cast<long>(a - 2 * i) * (b - 2 * j);
                x = cyc_mul(x, cyc_from_power(sign >= 0 ? mm : -mm, n));
            }
    }

    /// sum_n c_n (F^n (x) E^n) w on V_a (x) V_b, with the forward
    /// coefficients for sign = +1 and the inverse-series coefficients
    /// (-1)^n q^{-n(n-1)/2} (q-q^{-1})^n/[n]! for sign = -1.
    TensorVec nilpotent_series(int a, int b, const TensorVec& w, int sign) const {
        const int n = order();
        const CycNum qm = cyc_sub(cyc_from_power(2, n), cyc_from_power(-2, n));  // q - q^{-1}
        TensorVec acc = w;
        TensorVec cur = w;
        CycNum coeff = cyc_one(n);
        const int nmax = std::min(a, b);
        for (int m = 1; m <= nmax; ++m) {
            CycNum qfm = fd_.qint(m);
            if (qfm.is_zero()) break;  // truncation at the root of unity
            cur = apply_fn_en(a, b, cur);
            coeff = cyc_mul(coeff, cyc_mul(qm, cyc_inv(qfm)));
            coeff = cyc_mul(coeff, cyc_from_power(sign >= 0 ? 2L * (m - 1) : -2L * (m - 1), n));
            if (sign < 0) coeff = cyc_neg(coeff);
            for (int i = 0; i <= a; ++i)
                for (int j = 0; j <= b; ++j) {
                    const CycNum& t = cur[static_cast<size_t>(i)][static_cast<size_t>(j)];
                    if (t.is_zero()) continue;
                    acc[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        cyc_add(acc[static_cast<size_t>(i)][static_cast<size_t>(j)], cyc_mul(coeff, t));
                }
        }
        return acc;
    }

    /// One application of F (x) E on V_a (x) V_b.
    TensorVec apply_fn_en(int a, int b, const TensorVec& w) const {
        TensorVec nxt = make_tensor(a, b);
        for (int i = 0; i <= a; ++i)
            for (int j = 0; j <= b; ++j) {
                const CycNum& x = w[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (x.is_zero()) continue;
                if (i < a && j > 0) {
                    CycNum val = cyc_mul(x, cyc_mul(fd_.qint(i + 1), fd_.qint(b - j + 1)));
                    nxt[static_cast<size_t>(i + 1)][static_cast<size_t>(j - 1)] =
                        cyc_add(nxt[static_cast<size_t>(i + 1)][static_cast<size_t>(j - 1)], val);
                }
            }
        return nxt;
    }

    /// rw = mu * w componentwise; extract mu and assert exact proportionality.
    CycNum proportionality(const TensorVec& rw, const TensorVec& w, const char* who) const {
        const CycNum* pivot = nullptr;
        const CycNum* pivot_r = nullptr;
        if (rw.size() != w.size()) throw std::logic_error(std::string(who) + ": shape mismatch");
        for (size_t i = 0; i < w.size(); ++i) {
            if (rw[i].size() != w[i].size()) throw std::logic_error(std::string(who) + ": shape mismatch");
            for (size_t j = 0; j < w[i].size(); ++j)
                if (!w[i][j].is_zero() && pivot == nullptr) {
                    pivot = &w[i][j];
                    pivot_r = &rw[i][j];
                }
        }
        if (pivot == nullptr) throw std::logic_error(std::string(who) + ": zero reference vector");
        CycNum mu = cyc_mul(*pivot_r, cyc_inv(*pivot));
        for (size_t i = 0; i < w.size(); ++i)
            for (size_t j = 0; j < w[i].size(); ++j)
                if (!(rw[i][j] == cyc_mul(mu, w[i][j])))
                    throw std::logic_error(std::string(who) + ": vector not an eigenvector");
        return mu;
    }

    FusionData fd_;
};

}  // namespace oracle
}  // namespace qtqft
