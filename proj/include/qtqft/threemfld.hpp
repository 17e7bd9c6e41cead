#pragma once
/// Exact invariants of closed oriented 3-manifolds, built on the block
/// engine: framed surgery links, Heegaard diagrams (torus words, explicit
/// curve systems, incidence pairings), Singer-move checks, and the canonical
/// thickening of a triangulation into a Heegaard decomposition.
///
/// All values are exact cyclotomic numbers at the doubled order 8r, the
/// field that carries the modular data of the level.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "blocks.hpp"

namespace qtqft {

// ---------------------------------------------------------------------------
// Signatures of exact symmetric matrices
// ---------------------------------------------------------------------------

/// Inertia of a symmetric rational matrix: counts of positive, negative and
/// zero eigenvalues.  Computed by exact symmetric congruence reduction, so
/// no floating point is involved.
struct Signature {
    int pos = 0;
    int neg = 0;
    int zero = 0;
};

inline Signature sym_signature(std::vector<std::vector<mpq_class>> a) {
    const size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw std::invalid_argument("sym_signature: matrix not square");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (a[i][j] != a[j][i]) throw std::invalid_argument("sym_signature: matrix not symmetric");

    Signature s;
    std::vector<char> done(n, 0);
    size_t remaining = n;
    while (remaining > 0) {
        size_t p = n;
        for (size_t i = 0; i < n; ++i)
            if (!done[i] && a[i][i] != 0) {
                p = i;
                break;
            }
        if (p == n) {
            // All remaining diagonal entries vanish; look for an off-diagonal
            // entry and fold it onto the diagonal (e_i += e_j turns the
            // hyperbolic 2x2 block into one with nonzero corner).
            size_t bi = n, bj = n;
            for (size_t i = 0; i < n && bi == n; ++i)
                if (!done[i])
                    for (size_t j = i + 1; j < n; ++j)
                        if (!done[j] && a[i][j] != 0) {
                            bi = i;
                            bj = j;
                            break;
                        }
            if (bi == n) {
                s.zero += static_cast<int>(remaining);
                break;
            }
            for (size_t t = 0; t < n; ++t)
                if (!done[t]) a[bi][t] += a[bj][t];
            for (size_t t = 0; t < n; ++t)
                if (!done[t]) a[t][bi] += a[t][bj];
            continue;
        }
        (a[p][p] > 0 ? s.pos : s.neg) += 1;
        done[p] = 1;
        --remaining;
        for (size_t i = 0; i < n; ++i) {
            if (done[i] || a[i][p] == 0) continue;
            mpq_class f = a[i][p] / a[p][p];
            for (size_t j = 0; j < n; ++j)
                if (!done[j]) a[i][j] -= f * a[p][j];
        }
        // Restore symmetry of the reduced block (column p is now irrelevant).
        for (size_t i = 0; i < n; ++i)
            if (!done[i])
                for (size_t j = 0; j < n; ++j)
                    if (!done[j]) a[j][i] = a[i][j];
    }
    return s;
}

inline Signature sym_signature(const std::vector<std::vector<long>>& m) {
    std::vector<std::vector<mpq_class>> a(m.size());
    for (size_t i = 0; i < m.size(); ++i) a[i].assign(m[i].begin(), m[i].end());
    return sym_signature(std::move(a));
}

// ---------------------------------------------------------------------------
// Framed surgery links
// ---------------------------------------------------------------------------

/// A framed link presented as a closed Morse word.  Component framings are
/// the integers of the word's `framings` header (defaulting to zero); the
/// blackboard writhe of the drawing is corrected automatically, so framings
/// are honest surgery coefficients.
struct FramedSurgeryLink {
    MorseWord word;

    std::vector<long> framings() const {
        if (!word.framings.empty()) return word.framings;
        return std::vector<long>(static_cast<size_t>(word.ncomponents), 0);
    }
};

inline FramedSurgeryLink make_surgery_link(MorseWord w, std::vector<long> framings = {}) {
    if (!w.colors.empty())
        throw std::invalid_argument("make_surgery_link: surgery words carry no fixed coloring");
    if (!framings.empty()) {
        if (static_cast<int>(framings.size()) != w.ncomponents)
            throw std::invalid_argument("make_surgery_link: framing count does not match components");
        w.framings = std::move(framings);
    }
    if (!w.framings.empty() && static_cast<int>(w.framings.size()) != w.ncomponents)
        throw std::invalid_argument("make_surgery_link: framing count does not match components");
    return FramedSurgeryLink{std::move(w)};
}

inline FramedSurgeryLink parse_surgery_link(const std::string& text) {
    MorseWord w = parse_morse_word(text);
    if (!w.colors.empty())
        throw std::runtime_error("surgery words carry no 'colors' header; colors are summed over");
    return FramedSurgeryLink{std::move(w)};
}

/// L together with a split unknotted component of the given framing — the
/// stabilization whose invariance characterizes the normalization.
inline FramedSurgeryLink with_disjoint_unknot(FramedSurgeryLink link, long framing) {
    MorseWord& w = link.word;
    if (!w.ref_mode && w.ncomponents > 0)
        throw std::invalid_argument("with_disjoint_unknot: needs a component-referenced word");
    w.ref_mode = true;
    std::vector<long> f = link.framings();
    const int comp = w.ncomponents;
    w.ncomponents += 1;
    f.push_back(framing);
    w.framings = std::move(f);
    w.ops.push_back({MorseOp::Cup, 0, 0, 0, comp, -1});
    w.ops.push_back({MorseOp::Cap, 0, 0, 0, comp, -1});
    return link;
}

/// The mirror link: all crossings reversed, all framings negated.
inline FramedSurgeryLink mirror(FramedSurgeryLink link) {
    for (MorseOp& op : link.word.ops) {
        if (op.kind == MorseOp::CrossPos)
            op.kind = MorseOp::CrossNeg;
        else if (op.kind == MorseOp::CrossNeg)
            op.kind = MorseOp::CrossPos;
    }
    std::vector<long> f = link.framings();
    for (long& x : f) x = -x;
    link.word.framings = std::move(f);
    return link;
}

/// Full output of a surgery evaluation: the normalized invariant, the raw
/// colored sum before normalization, and the linking data that entered the
/// signature correction.
struct SurgeryResult {
    CycNum value;                             ///< normalized invariant, order 8r
    CycNum raw;                               ///< unnormalized colored sum, order 8r
    Signature sig;                            ///< inertia of the linking matrix
    std::vector<std::vector<long>> linking;   ///< framings on the diagonal
    std::vector<long> writhe;                 ///< blackboard writhe per component
};

namespace detail {

/// Colored term of the surgery sum for one coloring index, at order 4r.
/// Colorings are ordered lexicographically with component 0 most
/// significant, which fixes the (exactly reproducible) reduction order.
inline CycNum surgery_term(BlocksEngine& eng, const MorseWord& w, const std::vector<long>& framings,
                           const std::vector<long>& writhe, long index) {
    const FusionData& fd = eng.fusion();
    const int n = w.ncomponents;
    const int nlab = fd.level() + 1;
    std::vector<int> col(static_cast<size_t>(n), 0);
    long rest = index;
    for (int i = n - 1; i >= 0; --i) {
        col[static_cast<size_t>(i)] = static_cast<int>(rest % nlab);
        rest /= nlab;
    }
    CycNum term = eng.link_invariant(w, col);
    for (int i = 0; i < n; ++i) {
        const int a = col[static_cast<size_t>(i)];
        term = cyc_mul(term, fd.qdim(a));
        const long twists = framings[static_cast<size_t>(i)] - writhe[static_cast<size_t>(i)];
        if (twists != 0) term = cyc_mul(term, cyc_pow(fd.twist(a), twists));
    }
    return term;
}

inline int env_threads() {
    const char* v = std::getenv("QTQFT_THREADS");
    if (v == nullptr || *v == '\0') return 1;
    long n = std::strtol(v, nullptr, 10);
    if (n < 1) n = 1;
    if (n > 64) n = 64;
    return static_cast<int>(n);
}

/// Divide a raw colored sum by the Gauss-sum powers of the linking-matrix
/// inertia: Delta_+^{b_+} Delta_-^{b_-} D^{b_0}.
inline CycNum signature_normalize(const FusionData& fd, const CycNum& raw, const Signature& sig) {
    CycNum value = raw;
    if (sig.pos > 0) value = cyc_mul(value, cyc_pow(cyc_inv(fd.delta_plus()), sig.pos));
    if (sig.neg > 0) value = cyc_mul(value, cyc_pow(cyc_inv(fd.delta_minus()), sig.neg));
    if (sig.zero > 0) value = cyc_mul(value, cyc_pow(fd.total_dim_inv(), sig.zero));
    return value;
}

}  // namespace detail

/// Evaluate a framed surgery link: the colored sum
///   RAW = sum_alpha prod_i [d_{alpha_i}] v_{alpha_i}^{f_i - w_i} ·
///         link_invariant(L, alpha)
/// normalized by the Gauss-sum powers of the linking-matrix inertia,
///   value = RAW / (Delta_+^{b_+} Delta_-^{b_-} D^{b_0}),
/// so that the empty link gives 1 and a split +-1-framed unknot changes
/// nothing.  The linking matrix is read back from the engine's crossing
/// bookkeeping, never recomputed from assumptions about the word.
inline SurgeryResult surgery_invariant_full(BlocksEngine& eng, const FramedSurgeryLink& link) {
    const FusionData& fd = eng.fusion();
    const MorseWord& w = link.word;
    if (w.level != fd.level())
        throw std::invalid_argument("surgery_invariant: word level does not match engine level");
    const int n = w.ncomponents;
    const int nlab = fd.level() + 1;
    const int order2 = fd.params().order2;
    const std::vector<long> framings = link.framings();

    // One symbolic evaluation fixes writhe and linking; both are independent
    // of the coloring.
    EvalResult sym = eng.evaluate_closed(w, std::vector<int>(static_cast<size_t>(n), 0));

    SurgeryResult res;
    res.writhe = sym.writhe;
    res.linking.assign(static_cast<size_t>(n), std::vector<long>(static_cast<size_t>(n), 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                res.linking[i][j] = framings[static_cast<size_t>(i)];
            } else {
                const long c = sym.cross_sum[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (c % 2 != 0)
                    throw std::logic_error("surgery_invariant: odd crossing count between components");
                res.linking[i][j] = c / 2;
            }
        }
    }
    res.sig = sym_signature(res.linking);

    long total = 1;
    for (int i = 0; i < n; ++i) total *= nlab;

    const int nthreads = std::min<long>(detail::env_threads(), total);
    CycNum raw4 = cyc_zero(fd.params().order);
    if (nthreads <= 1) {
        for (long idx = 0; idx < total; ++idx)
            raw4 = cyc_add(raw4, detail::surgery_term(eng, w, framings, res.writhe, idx));
    } else {
        // Contiguous slots in coloring order; each worker owns a private
        // engine (the crossing-kernel cache is not shared) and the slot
        // results are combined in slot order, so the exact value is
        // independent of the thread count.
        std::vector<CycNum> slot(static_cast<size_t>(nthreads), cyc_zero(fd.params().order));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nthreads));
        const long chunk = (total + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t]() {
                BlocksEngine local(fd.level());
                const long lo = t * chunk;
                const long hi = std::min(total, lo + chunk);
                CycNum acc = cyc_zero(local.fusion().params().order);
                for (long idx = lo; idx < hi; ++idx)
                    acc = cyc_add(acc, detail::surgery_term(local, w, framings, res.writhe, idx));
                slot[static_cast<size_t>(t)] = std::move(acc);
            });
        }
        for (auto& th : pool) th.join();
        for (const CycNum& s : slot) raw4 = cyc_add(raw4, s);
    }

    res.raw = cyc_lift(raw4, order2);
    res.value = detail::signature_normalize(fd, res.raw, res.sig);
    return res;
}

inline CycNum surgery_invariant(BlocksEngine& eng, const FramedSurgeryLink& link) {
    return surgery_invariant_full(eng, link).value;
}

// ---------------------------------------------------------------------------
// Heegaard diagrams
// ---------------------------------------------------------------------------

/// One attaching curve of a genus-g curve system.  The curve threads once
/// through each handle in `handles` (a nonempty strictly increasing subset of
/// 1..g), carries an integer surgery coefficient relative to its drawn
/// framing, and may be orientation-reversed.
struct CurveSpec {
    std::vector<int> handles;
    long framing = 0;
    bool reversed = false;
};

/// One Dehn-twist letter along a standard curve: family 'a' (the meridian
/// a_i of handle i, bounding inside), 'b' (the dual curve through handle i,
/// bounding outside), or 'c' (through handles i and i+1).  `power` is the
/// signed twist exponent.
struct TwistLetter {
    char family = 'b';
    int index = 1;
    int power = 1;
};

/// A Heegaard diagram in one of four presentations.
///
///  * ModularWord (genus 1): the gluing map as a word in the torus
///    generators S and T, or the identity.  The empty gluing is S^2 x S^1.
///  * TwistWord: the gluing relative to the reference gluing, as an ordered
///    sequence of Dehn twists along standard curves; the empty word is the
///    sphere.  Letters whose curves intersect on the surface are rejected
///    (transporting curves through twists is out of scope).
///  * Curves: the attaching curves of the outer handlebody given explicitly;
///    evaluated through the doubled surgery presentation
///    {x_1(0), ..., x_g(0)} u {y_j(f_j)}.
///  * Incidence: only the x.y intersection pairing survives (the output of
///    canonical thickening); evaluated by exact handle cancellation.
struct HeegaardDiagram {
    enum class Rep { ModularWord, TwistWord, Curves, Incidence };
    Rep rep = Rep::ModularWord;
    int genus = 1;
    std::string modular_word;                    ///< ModularWord
    std::vector<TwistLetter> letters;            ///< TwistWord
    std::vector<CurveSpec> y_curves;             ///< Curves
    std::vector<CurveSpec> z_curves;             ///< optional reference system (Curves)
    std::vector<std::vector<long>> incidence;    ///< Incidence
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

/// Chain of surgery coefficients denoted by a genus-1 gluing word.  The word
/// is read lexically: maximal T-runs between S letters become the entries
/// c_1..c_n of a chain; a leading run counts only when it contains a literal
/// T letter, an interior empty run counts as 0, and the run after the last S
/// is dropped (those twists extend over the inner handlebody).  A word with
/// no S letter is the identity-type gluing, chain (0).
///   ""        -> (0)    S^2 x S^1
///   "S"       -> ()     S^3
///   "T^p S"   -> (p)    L(p,1)
///   "S S"     -> (0)    S^2 x S^1
inline std::vector<long> torus_word_chain(const std::string& word) {
    std::vector<long> chain;
    long run = 0;
    bool run_has_letter = false;
    bool seen_s = false;
    for (const std::string& tok : detail::split_ws(word)) {
        if (tok == "identity" || tok == "id" || tok == "I") continue;
        if (tok == "S") {
            if (seen_s || run_has_letter) chain.push_back(run);
            run = 0;
            run_has_letter = false;
            seen_s = true;
        } else if (tok == "T") {
            run += 1;
            run_has_letter = true;
        } else if (tok.rfind("T^", 0) == 0) {
            size_t pos = 0;
            long e = 0;
            const std::string num = tok.substr(2);
            try {
                e = std::stol(num, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != num.size() || num.empty())
                throw std::invalid_argument("torus word: bad twist exponent in '" + tok + "'");
            run += e;
            run_has_letter = true;
        } else {
            throw std::invalid_argument("torus word: unknown letter '" + tok + "'");
        }
    }
    if (!seen_s) return {0};
    return chain;
}

/// Raw colored sum of the chain c_1..c_n through the modular representation:
///   RAW = D^{n+1} (S T^{c_1} S T^{c_2} ... T^{c_n} S)_{00},
/// the value the block engine assigns to the corresponding chain link of
/// 0-framed-clasped unknots weighted by quantum dimensions and twists.
inline CycNum chain_raw(const FusionData& fd, const std::vector<long>& chain) {
    const int order2 = fd.params().order2;
    const int nlab = fd.level() + 1;
    const auto& S = fd.smatrix();
    std::vector<CycNum> tw;
    tw.reserve(static_cast<size_t>(nlab));
    for (int a = 0; a < nlab; ++a) tw.push_back(cyc_lift(fd.twist(a), order2));

    // Row vector u = e_0 S, then alternate T^{c_i} and S.
    std::vector<CycNum> u(S[0].begin(), S[0].end());
    for (long c : chain) {
        for (int a = 0; a < nlab; ++a)
            if (c != 0) u[static_cast<size_t>(a)] = cyc_mul(u[static_cast<size_t>(a)], cyc_pow(tw[static_cast<size_t>(a)], c));
        std::vector<CycNum> v(static_cast<size_t>(nlab), cyc_zero(order2));
        for (int b = 0; b < nlab; ++b) {
            CycNum acc = cyc_zero(order2);
            for (int a = 0; a < nlab; ++a)
                acc = cyc_add(acc, cyc_mul(u[static_cast<size_t>(a)], S[static_cast<size_t>(a)][static_cast<size_t>(b)]));
            v[static_cast<size_t>(b)] = std::move(acc);
        }
        u = std::move(v);
    }
    // One factor of D per handlebody side of each S in the bracketed product.
    CycNum raw = u[0];
    for (size_t i = 0; i <= chain.size(); ++i) raw = cyc_mul(raw, fd.total_dim());
    return raw;
}

/// Tridiagonal linking matrix of a chain: framings on the diagonal, unit
/// clasps between consecutive components.
inline std::vector<std::vector<long>> chain_linking(const std::vector<long>& chain) {
    const size_t n = chain.size();
    std::vector<std::vector<long>> m(n, std::vector<long>(n, 0));
    for (size_t i = 0; i < n; ++i) {
        m[i][i] = chain[i];
        if (i + 1 < n) m[i][i + 1] = m[i + 1][i] = 1;
    }
    return m;
}

/// Morse word for a genus-g curve system: the g zero-framed meridian rings
/// x_1..x_g side by side, then each curve drawn as a thread that winds once
/// through every member handle.  Every component is drawn with blackboard
/// writhe zero except reversed curves, whose single compensating curl is
/// corrected by the framing bookkeeping of surgery_invariant.
inline FramedSurgeryLink build_curve_link(int level, int genus, const std::vector<CurveSpec>& curves) {
    if (genus < 1) throw std::invalid_argument("build_curve_link: genus must be >= 1");
    for (size_t c = 0; c < curves.size(); ++c) {
        const CurveSpec& spec = curves[c];
        if (spec.handles.empty())
            throw std::invalid_argument("build_curve_link: curve " + std::to_string(c + 1) + " has no handles");
        int prev = 0;
        for (int h : spec.handles) {
            if (h < 1 || h > genus)
                throw std::invalid_argument("build_curve_link: curve " + std::to_string(c + 1) +
                                            " leaves the handle range 1.." + std::to_string(genus));
            if (h <= prev)
                throw std::invalid_argument("build_curve_link: curve " + std::to_string(c + 1) +
                                            " must list distinct increasing handles");
            prev = h;
        }
    }

    MorseWord w;
    w.level = level;
    w.ref_mode = true;
    w.ncomponents = genus + static_cast<int>(curves.size());
    w.framings.assign(static_cast<size_t>(w.ncomponents), 0);
    for (size_t c = 0; c < curves.size(); ++c)
        w.framings[static_cast<size_t>(genus) + c] = curves[c].framing;

    struct Strand {
        int comp;
        int dir;
    };
    std::vector<Strand> sim;

    auto emit = [&w](MorseOp::Kind kind, int n, int k, int comp) {
        w.ops.push_back({kind, n, 0, k, comp, -1});
    };
    auto birth_at = [&](int comp, int pos) {
        emit(MorseOp::Birth, static_cast<int>(sim.size()), pos, comp);
        sim.insert(sim.begin() + (pos - 1), {Strand{comp, -1}, Strand{comp, +1}});
    };
    auto cross_at = [&](int pos, bool positive) {
        emit(positive ? MorseOp::CrossPos : MorseOp::CrossNeg, static_cast<int>(sim.size()), pos, -1);
        std::swap(sim[static_cast<size_t>(pos - 1)], sim[static_cast<size_t>(pos)]);
    };
    auto death_at = [&](int pos) {
        const Strand& s1 = sim[static_cast<size_t>(pos - 1)];
        const Strand& s2 = sim[static_cast<size_t>(pos)];
        if (s1.comp != s2.comp || s1.dir + s2.dir != 0)
            throw std::logic_error("build_curve_link: internal strand bookkeeping failed");
        emit(MorseOp::Death, static_cast<int>(sim.size()), pos, -1);
        sim.erase(sim.begin() + (pos - 1), sim.begin() + (pos + 1));
    };
    auto find_strand = [&](int comp, int dir) -> int {
        for (size_t i = 0; i < sim.size(); ++i)
            if (sim[i].comp == comp && sim[i].dir == dir) return static_cast<int>(i) + 1;
        throw std::logic_error("build_curve_link: strand not found");
    };

    // Meridian rings x_1..x_g, side by side on one sphere.
    emit(MorseOp::Cup, 0, 0, 0);
    sim.push_back({0, -1});
    sim.push_back({0, +1});
    for (int h = 1; h < genus; ++h) birth_at(h, static_cast<int>(sim.size()) + 1);

    // Threads.  Each walks right from just left of its first member handle,
    // crossing everything up to the last member handle's left strand, then
    // walks back; member left strands are crossed positively both times
    // (one clasp per member ring), everything else cancels in opposite
    // pairs.  Reversed curves start with a self-crossing that swaps the
    // walker, flipping the orientation of every clasp.
    for (size_t c = 0; c < curves.size(); ++c) {
        const CurveSpec& spec = curves[c];
        const int comp = genus + static_cast<int>(c);
        const std::set<int> members(spec.handles.begin(), spec.handles.end());
        const int hmin = spec.handles.front();
        const int hmax = spec.handles.back();

        const int birth_pos = find_strand(hmin - 1, -1);
        birth_at(comp, birth_pos);
        if (spec.reversed) cross_at(birth_pos, true);

        int walker = birth_pos + 1;
        const int stop = find_strand(hmax - 1, -1);  // walk until past this strand
        while (walker < stop) {
            cross_at(walker, true);
            ++walker;
        }
        while (walker > birth_pos + 1) {
            const Strand& next = sim[static_cast<size_t>(walker - 2)];
            const bool member_left = next.dir == -1 && members.count(next.comp + 1) > 0;
            cross_at(walker - 1, member_left);
            --walker;
        }
        death_at(birth_pos);
    }

    // Close the rings, innermost pairs first.
    for (int h = genus - 1; h >= 1; --h) death_at(find_strand(h, -1));
    emit(MorseOp::Cap, 0, 0, 0);
    sim.clear();

    return FramedSurgeryLink{std::move(w)};
}

namespace detail {

/// Handles met by a standard twist curve.
inline std::vector<int> letter_handles(const TwistLetter& l, int genus) {
    if (l.index < 1) throw std::invalid_argument("twist letter: index must be >= 1");
    switch (l.family) {
        case 'a':
        case 'b':
            if (l.index > genus) throw std::invalid_argument("twist letter: handle index exceeds genus");
            return {l.index};
        case 'c':
            if (l.index + 1 > genus)
                throw std::invalid_argument("twist letter: c-curve needs handles " + std::to_string(l.index) +
                                            " and " + std::to_string(l.index + 1));
            return {l.index, l.index + 1};
        default:
            throw std::invalid_argument("twist letter: unknown family");
    }
}

/// Whether the standard curves of two letters intersect on the surface.
inline bool letters_intersect(const TwistLetter& p, const TwistLetter& q) {
    if (p.family == q.family) return false;  // parallel family members are disjoint
    auto meets = [](const TwistLetter& a, const TwistLetter& bc) {
        // a_i meets b_i once; a_i meets c_{i-1} and c_i once; b likewise.
        if (bc.family == 'b') return a.index == bc.index;
        return a.index == bc.index || a.index == bc.index + 1;
    };
    if (p.family == 'a' || (p.family == 'b' && q.family == 'c')) return meets(p, q);
    if (q.family == 'a' || (q.family == 'b' && p.family == 'c')) return meets(q, p);
    return false;
}

inline std::string letter_name(const TwistLetter& l) {
    return std::string(1, l.family) + std::to_string(l.index);
}

}  // namespace detail

/// Surgery link of a twist word: the word denotes the gluing relative to the
/// reference gluing, so each unit twist contributes one unknotted component
/// with framing -sign.  Stacked copies of disjoint curves have linking zero,
/// hence the components are split; letters whose curves intersect would
/// require transporting curves through twists and are rejected.
inline FramedSurgeryLink build_twist_link(int level, int genus, const std::vector<TwistLetter>& letters) {
    for (const TwistLetter& l : letters) detail::letter_handles(l, genus);
    for (size_t i = 0; i < letters.size(); ++i)
        for (size_t j = i + 1; j < letters.size(); ++j)
            if (detail::letters_intersect(letters[i], letters[j]))
                throw std::invalid_argument("twist word: curves " + detail::letter_name(letters[i]) + " and " +
                                            detail::letter_name(letters[j]) +
                                            " intersect; give the diagram as explicit curves instead");
    MorseWord w;
    w.level = level;
    w.ref_mode = true;
    for (const TwistLetter& l : letters) {
        const long copies = l.power >= 0 ? l.power : -l.power;
        const long framing = l.power >= 0 ? -1 : +1;
        for (long c = 0; c < copies; ++c) {
            const int comp = w.ncomponents++;
            w.framings.push_back(framing);
            w.ops.push_back({MorseOp::Cup, 0, 0, 0, comp, -1});
            w.ops.push_back({MorseOp::Cap, 0, 0, 0, comp, -1});
        }
    }
    return FramedSurgeryLink{std::move(w)};
}

/// Full output of a Heegaard evaluation.
struct HeegaardResult {
    CycNum value;
    CycNum raw;
    Signature sig;
    std::vector<long> chain;     ///< genus-1 modular path
    FramedSurgeryLink link;      ///< surgery path, when one was built
    bool used_link = false;
};

/// Exact handle-cancellation evaluation of an incidence pairing.  Rows are
/// the x-curves, columns the y-curves; both families are zero-framed and
/// mutually unlinked, so integer row operations (sliding x-curves over each
/// other), column operations (sliding y-curves) and removal of a pair
/// meeting exactly once and nothing else are all faithful diagram moves
/// under which the pairing matrix is a complete record.  The reduction picks
/// the smallest nonzero entry, shrinks its row and column Euclidean-style,
/// and cancels when the pivot reaches +-1; an empty matrix is the sphere,
/// value 1.  Diagrams whose pairing leaves an empty row or a pivot bigger
/// than 1 cannot be finished by these moves and are refused with the
/// obstruction named.
inline CycNum incidence_invariant(const FusionData& fd, std::vector<std::vector<long>> pairing) {
    const size_t n = pairing.size();
    for (const auto& row : pairing)
        if (row.size() != n) throw std::invalid_argument("incidence_invariant: pairing must be square");
    std::vector<std::vector<mpz_class>> a(n);
    for (size_t i = 0; i < n; ++i) a[i].assign(pairing[i].begin(), pairing[i].end());

    while (!a.empty()) {
        const size_t m = a.size();
        size_t pi = m, pj = m;
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) {
                if (a[i][j] == 0) continue;
                if (pi == m || abs(a[i][j]) < abs(a[pi][pj])) {
                    pi = i;
                    pj = j;
                }
            }
        if (pi == m)
            throw std::runtime_error(
                "incidence_invariant: a curve crosses nothing; "
                "the diagram does not reduce by handle cancellation");
        const mpz_class p = a[pi][pj];

        // Shrink: any entry in the pivot's row or column not divisible by the
        // pivot yields a strictly smaller nonzero entry after one slide.
        bool shrunk = false;
        for (size_t i = 0; i < m && !shrunk; ++i) {
            if (i == pi || a[i][pj] % p == 0) continue;
            const mpz_class q = a[i][pj] / p;  // truncated: |remainder| < |p|
            for (size_t j = 0; j < m; ++j) a[i][j] -= q * a[pi][j];
            shrunk = true;
        }
        for (size_t j = 0; j < m && !shrunk; ++j) {
            if (j == pj || a[pi][j] % p == 0) continue;
            const mpz_class q = a[pi][j] / p;
            for (size_t i = 0; i < m; ++i) a[i][j] -= q * a[i][pj];
            shrunk = true;
        }
        if (shrunk) continue;

        if (p != 1 && p != -1)
            throw std::runtime_error("incidence_invariant: curves meet with multiplicity " + p.get_str() +
                                     "; the diagram does not reduce by handle cancellation");
        for (size_t i = 0; i < m; ++i) {
            if (i == pi || a[i][pj] == 0) continue;
            const mpz_class q = a[i][pj] / p;
            for (size_t j = 0; j < m; ++j) a[i][j] -= q * a[pi][j];
        }
        for (size_t j = 0; j < m; ++j) {
            if (j == pj || a[pi][j] == 0) continue;
            const mpz_class q = a[pi][j] / p;
            for (size_t i = 0; i < m; ++i) a[i][j] -= q * a[i][pj];
        }
        a.erase(a.begin() + static_cast<long>(pi));
        for (auto& row : a) row.erase(row.begin() + static_cast<long>(pj));
    }
    return cyc_one(fd.params().order2);
}

/// Evaluate a Heegaard diagram.  Genus-1 modular words go through the
/// modular representation; twist words and curve systems go through the
/// related surgery presentation; incidence pairings go through exact handle
/// cancellation.  When z-curves are given the value is the ratio of the two
/// surgery evaluations (the default reference diagram evaluates to 1).
inline HeegaardResult heegaard_invariant_full(BlocksEngine& eng, const HeegaardDiagram& d) {
    const FusionData& fd = eng.fusion();
    const int order2 = fd.params().order2;
    if (d.genus < 1) throw std::invalid_argument("heegaard_invariant: genus must be >= 1");

    HeegaardResult res{cyc_one(order2), cyc_one(order2), Signature{}, {}, FramedSurgeryLink{}, false};
    switch (d.rep) {
        case HeegaardDiagram::Rep::ModularWord: {
            if (d.genus != 1)
                throw std::invalid_argument("heegaard_invariant: modular words describe genus-1 gluings");
            res.chain = torus_word_chain(d.modular_word);
            res.raw = chain_raw(fd, res.chain);
            res.sig = sym_signature(chain_linking(res.chain));
            res.value = detail::signature_normalize(fd, res.raw, res.sig);
            return res;
        }
        case HeegaardDiagram::Rep::TwistWord: {
            res.link = build_twist_link(fd.level(), d.genus, d.letters);
            res.used_link = true;
            SurgeryResult s = surgery_invariant_full(eng, res.link);
            res.value = std::move(s.value);
            res.raw = std::move(s.raw);
            res.sig = s.sig;
            return res;
        }
        case HeegaardDiagram::Rep::Curves: {
            res.link = build_curve_link(fd.level(), d.genus, d.y_curves);
            res.used_link = true;
            SurgeryResult s = surgery_invariant_full(eng, res.link);
            res.value = std::move(s.value);
            res.raw = std::move(s.raw);
            res.sig = s.sig;
            if (!d.z_curves.empty()) {
                FramedSurgeryLink zlink = build_curve_link(fd.level(), d.genus, d.z_curves);
                res.value = cyc_div(res.value, surgery_invariant(eng, zlink));
            }
            return res;
        }
        case HeegaardDiagram::Rep::Incidence: {
            if (static_cast<int>(d.incidence.size()) != d.genus)
                throw std::invalid_argument("heegaard_invariant: incidence pairing size differs from genus");
            res.value = incidence_invariant(fd, d.incidence);
            res.raw = res.value;
            return res;
        }
    }
    throw std::logic_error("heegaard_invariant: unknown representation");
}

inline CycNum heegaard_invariant(BlocksEngine& eng, const HeegaardDiagram& d) {
    return heegaard_invariant_full(eng, d).value;
}

// ---------------------------------------------------------------------------
// Heegaard diagram text format
// ---------------------------------------------------------------------------

struct HeegaardFile {
    int level = 0;
    HeegaardDiagram diagram;
};

/// Parse the Heegaard text format:
///
///   qtqft-format 1
///   level 2
///   heegaard genus 1
///   word T^3 S
///
/// Genus >= 1 curve systems use `curve` lines instead of a word:
///
///   heegaard genus 2
///   curve 1 framing 0
///   curve 1 2 framing -1 reversed
///
/// Twist words use twist letters:  word twist(a1) twist(b2)^-1 twist(c1).
/// Incidence pairings use `incidence` followed by genus `row` lines.
inline HeegaardFile parse_heegaard(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&lineno](const std::string& msg) -> void {
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
    };

    HeegaardFile out;
    bool seen_format = false, seen_level = false, seen_genus = false;
    bool seen_word = false, seen_incidence = false;
    std::vector<std::vector<long>> rows;

    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::vector<std::string> toks = detail::split_ws(line);
        if (toks.empty()) continue;

        if (!seen_format) {
            if (toks.size() != 2 || toks[0] != "qtqft-format" || toks[1] != "1")
                fail("expected 'qtqft-format 1' header");
            seen_format = true;
            continue;
        }
        if (!seen_level) {
            if (toks.size() != 2 || toks[0] != "level") fail("expected 'level <k>'");
            try {
                out.level = std::stoi(toks[1]);
            } catch (const std::exception&) {
                fail("expected integer level");
            }
            seen_level = true;
            continue;
        }
        if (!seen_genus) {
            if (toks.size() != 3 || toks[0] != "heegaard" || toks[1] != "genus")
                fail("expected 'heegaard genus <g>'");
            try {
                out.diagram.genus = std::stoi(toks[2]);
            } catch (const std::exception&) {
                fail("expected integer genus");
            }
            if (out.diagram.genus < 1) fail("genus must be >= 1");
            seen_genus = true;
            continue;
        }

        if (toks[0] == "word") {
            if (seen_word || !out.diagram.y_curves.empty() || seen_incidence)
                fail("a diagram has one 'word' or curve lines or an incidence block");
            seen_word = true;
            std::vector<std::string> letters(toks.begin() + 1, toks.end());
            if (letters.empty()) fail("'word' needs letters or 'identity'");
            const bool twisty = letters[0].rfind("twist(", 0) == 0;
            if (!twisty) {
                out.diagram.rep = HeegaardDiagram::Rep::ModularWord;
                std::string joined;
                for (const std::string& t : letters) {
                    if (!joined.empty()) joined += ' ';
                    joined += t;
                }
                out.diagram.modular_word = joined;
                torus_word_chain(joined);  // validate letters eagerly
            } else {
                out.diagram.rep = HeegaardDiagram::Rep::TwistWord;
                for (const std::string& t : letters) {
                    // twist(a3), twist(b1)^-1, twist(c2)^4
                    if (t.rfind("twist(", 0) != 0) fail("twist words mix no other letters: '" + t + "'");
                    const size_t close = t.find(')');
                    if (close == std::string::npos || close < 8 - 1) fail("malformed twist letter '" + t + "'");
                    TwistLetter l;
                    l.family = t[6];
                    const std::string idx = t.substr(7, close - 7);
                    size_t pos = 0;
                    try {
                        l.index = std::stoi(idx, &pos);
                    } catch (const std::exception&) {
                        pos = 0;
                    }
                    if (pos != idx.size() || idx.empty()) fail("malformed twist index in '" + t + "'");
                    std::string rest = t.substr(close + 1);
                    if (!rest.empty()) {
                        if (rest[0] != '^') fail("malformed twist power in '" + t + "'");
                        rest = rest.substr(1);
                        try {
                            l.power = std::stoi(rest, &pos);
                        } catch (const std::exception&) {
                            pos = 0;
                        }
                        if (pos != rest.size() || rest.empty()) fail("malformed twist power in '" + t + "'");
                    }
                    out.diagram.letters.push_back(l);
                }
            }
            continue;
        }
        if (toks[0] == "curve" || toks[0] == "zcurve") {
            if (seen_word || seen_incidence) fail("curve lines cannot follow a word or incidence block");
            CurveSpec spec;
            size_t i = 1;
            for (; i < toks.size(); ++i) {
                if (toks[i] == "framing") break;
                try {
                    spec.handles.push_back(std::stoi(toks[i]));
                } catch (const std::exception&) {
                    fail("expected handle index, got '" + toks[i] + "'");
                }
            }
            if (spec.handles.empty()) fail("curve needs at least one handle index");
            if (i < toks.size()) {
                if (i + 1 >= toks.size()) fail("'framing' needs an integer");
                try {
                    spec.framing = std::stol(toks[i + 1]);
                } catch (const std::exception&) {
                    fail("expected integer framing");
                }
                i += 2;
            }
            if (i < toks.size()) {
                if (toks[i] != "reversed" || i + 1 != toks.size()) fail("trailing tokens after curve");
                spec.reversed = true;
            }
            std::vector<int> sorted = spec.handles;
            std::sort(sorted.begin(), sorted.end());
            spec.handles = std::move(sorted);
            out.diagram.rep = HeegaardDiagram::Rep::Curves;
            (toks[0] == "curve" ? out.diagram.y_curves : out.diagram.z_curves).push_back(std::move(spec));
            continue;
        }
        if (toks[0] == "incidence") {
            if (seen_word || !out.diagram.y_curves.empty()) fail("incidence cannot follow a word or curves");
            seen_incidence = true;
            out.diagram.rep = HeegaardDiagram::Rep::Incidence;
            continue;
        }
        if (toks[0] == "row") {
            if (!seen_incidence) fail("'row' lines belong to an incidence block");
            std::vector<long> row;
            for (size_t i = 1; i < toks.size(); ++i) {
                try {
                    row.push_back(std::stol(toks[i]));
                } catch (const std::exception&) {
                    fail("expected integer entry, got '" + toks[i] + "'");
                }
            }
            rows.push_back(std::move(row));
            continue;
        }
        fail("unknown directive '" + toks[0] + "'");
    }

    if (!seen_genus) {
        lineno = 0;
        fail("truncated header");
    }
    if (seen_incidence) {
        if (static_cast<int>(rows.size()) != out.diagram.genus)
            throw std::runtime_error("incidence block needs exactly genus rows");
        for (const auto& r : rows)
            if (static_cast<int>(r.size()) != out.diagram.genus)
                throw std::runtime_error("incidence rows need exactly genus entries");
        out.diagram.incidence = std::move(rows);
    } else if (!seen_word && out.diagram.y_curves.empty()) {
        throw std::runtime_error("diagram needs a word, curve lines, or an incidence block");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Singer moves
// ---------------------------------------------------------------------------

/// An elementary move on a Heegaard diagram: curve inversion, composition of
/// two curves (a handle slide), or stabilization by a trivial handle pair.
struct SingerMove {
    enum class Kind { Invert, Compose, Stabilize };
    Kind kind = Kind::Invert;
    int i = 1;  ///< 1-based curve index
    int j = 2;  ///< second curve for Compose
};

/// Apply a Singer move.  Inversion reverses a curve's orientation;
/// composition replaces curve j by the band sum with curve i (requiring
/// disjoint handle sets, so the slide adds framings and merges the handle
/// sets); stabilization adds a handle and its standard dual curve.  A
/// genus-1 sphere word stabilizes by first converting to the equivalent
/// one-curve system, exercising both evaluation pipelines.
inline HeegaardDiagram apply_singer(const HeegaardDiagram& d, const SingerMove& move) {
    HeegaardDiagram out = d;
    auto need_curves = [&](const char* what) {
        if (out.rep != HeegaardDiagram::Rep::Curves)
            throw std::invalid_argument(std::string("singer move: ") + what +
                                        " needs an explicit curve system");
    };
    switch (move.kind) {
        case SingerMove::Kind::Invert: {
            if (out.rep == HeegaardDiagram::Rep::ModularWord) return out;  // twists ignore orientation
            need_curves("inversion");
            if (move.i < 1 || move.i > static_cast<int>(out.y_curves.size()))
                throw std::invalid_argument("singer move: curve index out of range");
            out.y_curves[static_cast<size_t>(move.i - 1)].reversed ^= true;
            return out;
        }
        case SingerMove::Kind::Compose: {
            need_curves("composition");
            const int n = static_cast<int>(out.y_curves.size());
            if (move.i < 1 || move.i > n || move.j < 1 || move.j > n || move.i == move.j)
                throw std::invalid_argument("singer move: curve indices out of range");
            const CurveSpec& ci = out.y_curves[static_cast<size_t>(move.i - 1)];
            CurveSpec& cj = out.y_curves[static_cast<size_t>(move.j - 1)];
            std::vector<int> merged;
            std::set_union(ci.handles.begin(), ci.handles.end(), cj.handles.begin(), cj.handles.end(),
                           std::back_inserter(merged));
            if (merged.size() != ci.handles.size() + cj.handles.size())
                throw std::invalid_argument(
                    "singer move: composition needs curves through disjoint handles");
            if (ci.framing != 0)
                throw std::invalid_argument(
                    "singer move: composition over a framed curve would link the band sum to it; "
                    "only zero-framed curves can be slid over");
            cj.handles = std::move(merged);
            cj.framing += ci.framing;  // the slid curves are unlinked, so framings just add
            return out;
        }
        case SingerMove::Kind::Stabilize: {
            if (out.rep == HeegaardDiagram::Rep::ModularWord) {
                if (!torus_word_chain(out.modular_word).empty())
                    throw std::invalid_argument(
                        "singer move: only the sphere word converts to a curve system for stabilization");
                out.rep = HeegaardDiagram::Rep::Curves;
                out.modular_word.clear();
                out.y_curves = {CurveSpec{{1}, 0, false}};
            }
            need_curves("stabilization");
            out.genus += 1;
            out.y_curves.push_back(CurveSpec{{out.genus}, 0, false});
            return out;
        }
    }
    throw std::logic_error("singer move: unknown kind");
}

/// Evaluate a diagram before and after a Singer move; the two values agree
/// exactly when the move is implemented faithfully.
inline std::pair<CycNum, CycNum> singer_move_check(BlocksEngine& eng, const HeegaardDiagram& d,
                                                   const SingerMove& move) {
    CycNum before = heegaard_invariant(eng, d);
    CycNum after = heegaard_invariant(eng, apply_singer(d, move));
    return {std::move(before), std::move(after)};
}

// ---------------------------------------------------------------------------
// Triangulations and the canonical thickening
// ---------------------------------------------------------------------------

/// An oriented closed 3-manifold triangulation: tetrahedra as 4-tuples of
/// 1-based vertex ids.  Face gluings are derived from shared vertex triples;
/// validation is strict and cites the offending simplex.
struct SimplicialComplex3 {
    int nvertices = 0;
    std::vector<std::array<int, 4>> tets;
};

struct TriangulationFile {
    int level = 0;
    SimplicialComplex3 complex;
};

/// Parse the triangulation text format:
///
///   qtqft-format 1
///   level 2
///   triangulation
///   vertices 5
///   tetra 1 2 3 4
///   ...
inline TriangulationFile parse_triangulation(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&lineno](const std::string& msg) -> void {
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
    };

    TriangulationFile out;
    std::vector<std::pair<int, std::array<int, 4>>> glues;
    bool seen_format = false, seen_level = false, seen_kind = false, seen_vertices = false;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::vector<std::string> toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (!seen_format) {
            if (toks.size() != 2 || toks[0] != "qtqft-format" || toks[1] != "1")
                fail("expected 'qtqft-format 1' header");
            seen_format = true;
            continue;
        }
        if (!seen_level) {
            if (toks.size() != 2 || toks[0] != "level") fail("expected 'level <k>'");
            try {
                out.level = std::stoi(toks[1]);
            } catch (const std::exception&) {
                fail("expected integer level");
            }
            seen_level = true;
            continue;
        }
        if (!seen_kind) {
            if (toks.size() != 1 || toks[0] != "triangulation") fail("expected 'triangulation'");
            seen_kind = true;
            continue;
        }
        if (!seen_vertices) {
            if (toks.size() != 2 || toks[0] != "vertices") fail("expected 'vertices <n>'");
            try {
                out.complex.nvertices = std::stoi(toks[1]);
            } catch (const std::exception&) {
                fail("expected integer vertex count");
            }
            if (out.complex.nvertices < 1) fail("vertex count must be positive");
            seen_vertices = true;
            continue;
        }
        if (toks[0] == "tetra") {
            if (toks.size() != 5) fail("'tetra' needs four vertex ids");
            std::array<int, 4> t{};
            for (int i = 0; i < 4; ++i) {
                try {
                    t[static_cast<size_t>(i)] = std::stoi(toks[static_cast<size_t>(i) + 1]);
                } catch (const std::exception&) {
                    fail("expected vertex id, got '" + toks[static_cast<size_t>(i) + 1] + "'");
                }
            }
            out.complex.tets.push_back(t);
            continue;
        }
        if (toks[0] == "glue") {
            // Optional assertion: "glue t1 s1 t2 s2" claims that the face of
            // tetrahedron #t1 opposite its vertex in slot s1 (slots 0..3) is
            // the same face as the one of #t2 opposite slot s2.  Vertex ids
            // are global, so the identification is forced; the line is checked
            // against the tetra lines rather than defining anything new.
            if (toks.size() != 5) fail("'glue' needs <tet> <face> <tet> <face>");
            std::array<int, 4> g{};
            for (int i = 0; i < 4; ++i) {
                try {
                    g[static_cast<size_t>(i)] = std::stoi(toks[static_cast<size_t>(i) + 1]);
                } catch (const std::exception&) {
                    fail("expected integer, got '" + toks[static_cast<size_t>(i) + 1] + "'");
                }
            }
            glues.push_back({lineno, g});
            continue;
        }
        fail("unknown directive '" + toks[0] + "'");
    }
    if (!seen_vertices) {
        lineno = 0;
        fail("truncated header");
    }
    if (out.complex.tets.empty()) throw std::runtime_error("triangulation lists no tetrahedra");
    for (const auto& [gl, g] : glues) {
        lineno = gl;
        const int ntets = static_cast<int>(out.complex.tets.size());
        for (int side = 0; side < 2; ++side) {
            const int t = g[static_cast<size_t>(2 * side)];
            const int s = g[static_cast<size_t>(2 * side + 1)];
            if (t < 1 || t > ntets)
                fail("glue names tetrahedron #" + std::to_string(t) + ", but only " +
                     std::to_string(ntets) + " are listed");
            if (s < 0 || s > 3)
                fail("glue face slot " + std::to_string(s) + " is outside 0..3");
        }
        if (g[0] == g[2]) fail("glue pairs tetrahedron #" + std::to_string(g[0]) + " with itself");
        auto face_of = [&out](int t, int s) {
            const std::array<int, 4>& tet = out.complex.tets[static_cast<size_t>(t - 1)];
            std::array<int, 3> f{};
            int w = 0;
            for (int i = 0; i < 4; ++i)
                if (i != s) f[static_cast<size_t>(w++)] = tet[static_cast<size_t>(i)];
            std::sort(f.begin(), f.end());
            return f;
        };
        auto face_str = [](const std::array<int, 3>& f) {
            return "{" + std::to_string(f[0]) + "," + std::to_string(f[1]) + "," +
                   std::to_string(f[2]) + "}";
        };
        const std::array<int, 3> f1 = face_of(g[0], g[1]);
        const std::array<int, 3> f2 = face_of(g[2], g[3]);
        if (f1 != f2)
            fail("glue asserts face " + face_str(f1) + " of tetrahedron #" + std::to_string(g[0]) +
                 " matches face " + face_str(f2) + " of tetrahedron #" + std::to_string(g[2]) +
                 ", but they differ");
    }
    return out;
}

namespace detail {

inline std::array<int, 3> sorted3(int a, int b, int c) {
    std::array<int, 3> f{a, b, c};
    std::sort(f.begin(), f.end());
    return f;
}

inline bool perm_even(std::array<int, 4> p) {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[static_cast<size_t>(i)] > p[static_cast<size_t>(j)]) ++inv;
    return inv % 2 == 0;
}

/// Orientation sign of the ordered triple `tri` as the boundary face of the
/// ordered tetrahedron `tet` opposite its remaining vertex: +1 when the
/// cyclic order of `tri` agrees with the induced boundary orientation.
inline int induced_face_sign(const std::array<int, 4>& tet, const std::array<int, 3>& tri_sorted) {
    int opp = -1, pos = -1;
    for (int i = 0; i < 4; ++i) {
        const int v = tet[static_cast<size_t>(i)];
        if (std::find(tri_sorted.begin(), tri_sorted.end(), v) == tri_sorted.end()) {
            opp = v;
            pos = i;
        }
    }
    (void)opp;
    // Remove the opposite vertex; the parity of the remaining ordered triple
    // against the sorted triple, together with the slot parity, gives the
    // induced sign.
    std::array<int, 3> rest{};
    int w = 0;
    for (int i = 0; i < 4; ++i)
        if (i != pos) rest[static_cast<size_t>(w++)] = tet[static_cast<size_t>(i)];
    int inv = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (rest[static_cast<size_t>(i)] > rest[static_cast<size_t>(j)]) ++inv;
    int sign = (inv % 2 == 0) ? +1 : -1;
    if (pos % 2 != 0) sign = -sign;
    return sign;
}

}  // namespace detail

/// Validate a triangulation: simplicial (distinct vertices, no repeated
/// tetrahedra), closed (every triangle in exactly two tetrahedra), connected,
/// orientable, Euler characteristic zero, spherical vertex links, and the
/// tetravalency of the 1-skeleton required by the thickening (every vertex
/// meets exactly four edges).  Error messages cite the offending simplex.
inline void validate_complex(const SimplicialComplex3& K) {
    if (K.tets.empty()) throw std::runtime_error("complex has no tetrahedra");
    if (K.nvertices < 1) throw std::runtime_error("complex has no vertices");

    std::set<std::array<int, 4>> seen;
    for (size_t t = 0; t < K.tets.size(); ++t) {
        std::array<int, 4> tet = K.tets[t];
        for (int v : tet)
            if (v < 1 || v > K.nvertices)
                throw std::runtime_error("tetrahedron #" + std::to_string(t + 1) + " uses vertex " +
                                         std::to_string(v) + " outside 1.." + std::to_string(K.nvertices));
        std::array<int, 4> s = tet;
        std::sort(s.begin(), s.end());
        for (int i = 0; i < 3; ++i)
            if (s[static_cast<size_t>(i)] == s[static_cast<size_t>(i) + 1])
                throw std::runtime_error("tetrahedron #" + std::to_string(t + 1) + " repeats vertex " +
                                         std::to_string(s[static_cast<size_t>(i)]));
        if (!seen.insert(s).second)
            throw std::runtime_error("tetrahedron #" + std::to_string(t + 1) + " duplicates an earlier one");
    }

    // Faces and closedness.
    std::map<std::array<int, 3>, std::vector<size_t>> face_tets;
    for (size_t t = 0; t < K.tets.size(); ++t) {
        const auto& tet = K.tets[t];
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> f{};
            int w = 0;
            for (int i = 0; i < 4; ++i)
                if (i != skip) f[static_cast<size_t>(w++)] = tet[static_cast<size_t>(i)];
            std::sort(f.begin(), f.end());
            face_tets[f].push_back(t);
        }
    }
    for (const auto& [f, ts] : face_tets)
        if (ts.size() != 2)
            throw std::runtime_error("face {" + std::to_string(f[0]) + "," + std::to_string(f[1]) + "," +
                                     std::to_string(f[2]) + "} lies in " + std::to_string(ts.size()) +
                                     " tetrahedra, expected 2 (tetrahedron #" + std::to_string(ts[0] + 1) +
                                     ")");

    // Connectivity and orientability via the dual graph.
    std::vector<int> eps(K.tets.size(), 0);
    eps[0] = detail::perm_even(K.tets[0]) ? +1 : -1;
    std::vector<size_t> queue{0};
    size_t visited = 1;
    while (!queue.empty()) {
        const size_t t = queue.back();
        queue.pop_back();
        const auto& tet = K.tets[t];
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> f{};
            int w = 0;
            for (int i = 0; i < 4; ++i)
                if (i != skip) f[static_cast<size_t>(w++)] = tet[static_cast<size_t>(i)];
            std::sort(f.begin(), f.end());
            const auto& ts = face_tets.at(f);
            const size_t other = ts[0] == t ? ts[1] : ts[0];
            const int here = eps[t] * detail::induced_face_sign(tet, f);
            const int there = detail::induced_face_sign(K.tets[other], f);
            const int want = -here * there;  // the shared face must inherit opposite orientations
            if (eps[other] == 0) {
                eps[other] = want;
                queue.push_back(other);
                ++visited;
            } else if (eps[other] != want) {
                throw std::runtime_error("complex is not orientable (tetrahedra #" + std::to_string(t + 1) +
                                         " and #" + std::to_string(other + 1) + ")");
            }
        }
    }
    if (visited != K.tets.size()) throw std::runtime_error("complex is not connected");

    // Edge and vertex incidences.
    std::set<std::array<int, 2>> edges;
    std::map<int, std::set<int>> vertex_nbrs;
    std::set<int> used_vertices;
    for (const auto& tet : K.tets) {
        for (int i = 0; i < 4; ++i) {
            used_vertices.insert(tet[static_cast<size_t>(i)]);
            for (int j = i + 1; j < 4; ++j) {
                int a = tet[static_cast<size_t>(i)], b = tet[static_cast<size_t>(j)];
                if (a > b) std::swap(a, b);
                edges.insert({a, b});
                vertex_nbrs[a].insert(b);
                vertex_nbrs[b].insert(a);
            }
        }
    }
    if (static_cast<int>(used_vertices.size()) != K.nvertices)
        throw std::runtime_error("complex declares " + std::to_string(K.nvertices) + " vertices but uses " +
                                 std::to_string(used_vertices.size()));

    const long V = static_cast<long>(K.nvertices);
    const long E = static_cast<long>(edges.size());
    const long F = static_cast<long>(face_tets.size());
    const long T = static_cast<long>(K.tets.size());
    if (V - E + F - T != 0)
        throw std::runtime_error("Euler characteristic " + std::to_string(V - E + F - T) +
                                 " is nonzero; complex is not a closed 3-manifold");

    // Vertex links must be 2-spheres: V - E + F of the link equals 2 and the
    // link is connected.  Link vertices are incident edges, link edges are
    // incident faces, link faces are incident tetrahedra.
    for (int v = 1; v <= K.nvertices; ++v) {
        long lv = static_cast<long>(vertex_nbrs[v].size());
        long le = 0, lf = 0;
        std::map<std::array<int, 2>, std::vector<size_t>> link_edges;  // opposite edges per tet at v
        for (size_t t = 0; t < K.tets.size(); ++t) {
            const auto& tet = K.tets[t];
            if (std::find(tet.begin(), tet.end(), v) == tet.end()) continue;
            ++lf;
            std::array<int, 3> others{};
            int w = 0;
            for (int x : tet)
                if (x != v) others[static_cast<size_t>(w++)] = x;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    int a = others[static_cast<size_t>(i)], b = others[static_cast<size_t>(j)];
                    if (a > b) std::swap(a, b);
                    link_edges[{a, b}].push_back(t);
                }
        }
        le = static_cast<long>(link_edges.size());
        if (lv - le + lf != 2)
            throw std::runtime_error("link of vertex " + std::to_string(v) +
                                     " is not a sphere (Euler characteristic " +
                                     std::to_string(lv - le + lf) + ")");
        // Connectivity of the link: walk tetrahedra at v across shared faces.
        std::map<size_t, std::vector<size_t>> adj;
        for (const auto& [e, ts] : link_edges) {
            (void)e;
            for (size_t i = 0; i < ts.size(); ++i)
                for (size_t j = i + 1; j < ts.size(); ++j) {
                    adj[ts[i]].push_back(ts[j]);
                    adj[ts[j]].push_back(ts[i]);
                }
        }
        if (!adj.empty()) {
            std::set<size_t> seen_t{adj.begin()->first};
            std::vector<size_t> q{adj.begin()->first};
            while (!q.empty()) {
                size_t t = q.back();
                q.pop_back();
                for (size_t u : adj[t])
                    if (seen_t.insert(u).second) q.push_back(u);
            }
            if (seen_t.size() != static_cast<size_t>(lf))
                throw std::runtime_error("link of vertex " + std::to_string(v) + " is not connected");
        }
    }

    // Tetravalency of the 1-skeleton.
    for (int v = 1; v <= K.nvertices; ++v) {
        const size_t val = vertex_nbrs[v].size();
        if (val != 4)
            throw std::runtime_error("vertex " + std::to_string(v) + " has valence " + std::to_string(val) +
                                     ", expected 4");
    }
}

/// Cell counts of the canonical middle surface and the derived genus.
struct ThickeningReport {
    long vertices = 0, edges = 0, faces = 0, tets = 0;  ///< of the triangulation
    long l_vertices = 0, l_edges = 0, l_faces = 0;      ///< of the middle surface L
    long l_euler = 0;
    int genus = 0;
};

/// Thicken the 1-skeleton of a validated triangulation into a handlebody and
/// extract the Heegaard data of the decomposition M = N(skeleton) u L u
/// N(dual skeleton).  The middle surface L is assembled from one hexagon per
/// (vertex, tetrahedron) incidence and one rectangle per (edge, tetrahedron)
/// incidence; its Euler characteristic is counted cell by cell and checked
/// against 2 - 2g with g = 1 + #edges - #vertices from the graph.  The
/// meridian systems are indexed by non-tree edges and non-cotree faces, and
/// only their intersection pairing (edge-in-face incidence with boundary
/// orientation signs) survives into the returned diagram.
inline HeegaardDiagram canonical_thickening(const SimplicialComplex3& K, ThickeningReport* report = nullptr) {
    validate_complex(K);

    // Canonical cell inventories.
    std::set<std::array<int, 2>> edge_set;
    std::map<std::array<int, 3>, std::vector<size_t>> face_tets;
    for (size_t t = 0; t < K.tets.size(); ++t) {
        const auto& tet = K.tets[t];
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                int a = tet[static_cast<size_t>(i)], b = tet[static_cast<size_t>(j)];
                if (a > b) std::swap(a, b);
                edge_set.insert({a, b});
            }
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> f{};
            int w = 0;
            for (int i = 0; i < 4; ++i)
                if (i != skip) f[static_cast<size_t>(w++)] = tet[static_cast<size_t>(i)];
            std::sort(f.begin(), f.end());
            face_tets[f].push_back(t);
        }
    }
    std::vector<std::array<int, 2>> edges(edge_set.begin(), edge_set.end());
    std::vector<std::array<int, 3>> faces;
    faces.reserve(face_tets.size());
    for (const auto& [f, ts] : face_tets) {
        (void)ts;
        faces.push_back(f);
    }

    const long V = static_cast<long>(K.nvertices);
    const long E = static_cast<long>(edges.size());
    const long F = static_cast<long>(faces.size());
    const long T = static_cast<long>(K.tets.size());
    const int genus = static_cast<int>(1 + E - V);

    // Middle surface, cell by cell.  Hexagons are (vertex, tet) incidences,
    // rectangles are (edge, tet) incidences; edges of L are hex-hex contacts
    // (vertex, face), hex-rect contacts (vertex, edge, tet) and rect-rect
    // contacts (edge, face); vertices of L are flags (vertex, edge, face).
    const long l_faces = 4 * T + 6 * T;           // hexagons (v,t), rectangles (e,t)
    const long l_edges = 3 * F + 12 * T + 3 * F;  // hex-hex (v,f), hex-rect (v,e,t), rect-rect (e,f)
    const long l_vertices = 6 * F;                // flags (v,e,f): 3 edges x 2 ends per face
    const long l_euler = l_vertices - l_edges + l_faces;
    if (l_euler != 2 - 2 * static_cast<long>(genus))
        throw std::logic_error("canonical_thickening: surface Euler characteristic " +
                               std::to_string(l_euler) + " disagrees with genus " + std::to_string(genus));

    if (report != nullptr) {
        report->vertices = V;
        report->edges = E;
        report->faces = F;
        report->tets = T;
        report->l_vertices = l_vertices;
        report->l_edges = l_edges;
        report->l_faces = l_faces;
        report->l_euler = l_euler;
        report->genus = genus;
    }

    // Spanning tree of the 1-skeleton; x-curves are meridians of the
    // non-tree edges.
    std::vector<char> in_tree(edges.size(), 0);
    {
        std::set<int> reached{K.tets[0][0]};
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t e = 0; e < edges.size(); ++e) {
                if (in_tree[e]) continue;
                const bool ha = reached.count(edges[e][0]) > 0;
                const bool hb = reached.count(edges[e][1]) > 0;
                if (ha != hb) {
                    in_tree[e] = 1;
                    reached.insert(ha ? edges[e][1] : edges[e][0]);
                    grew = true;
                }
            }
        }
        if (static_cast<long>(reached.size()) != V)
            throw std::logic_error("canonical_thickening: 1-skeleton is not connected");
    }

    // Spanning cotree of the dual graph; y-curves are meridians of the
    // non-cotree faces.
    std::vector<char> in_cotree(faces.size(), 0);
    {
        std::set<size_t> reached{0};
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t f = 0; f < faces.size(); ++f) {
                if (in_cotree[f]) continue;
                const auto& ts = face_tets.at(faces[f]);
                const bool ha = reached.count(ts[0]) > 0;
                const bool hb = reached.count(ts[1]) > 0;
                if (ha != hb) {
                    in_cotree[f] = 1;
                    reached.insert(ha ? ts[1] : ts[0]);
                    grew = true;
                }
            }
        }
        if (reached.size() != K.tets.size())
            throw std::logic_error("canonical_thickening: dual graph is not connected");
    }

    std::vector<size_t> x_edges, y_faces;
    for (size_t e = 0; e < edges.size(); ++e)
        if (!in_tree[e]) x_edges.push_back(e);
    for (size_t f = 0; f < faces.size(); ++f)
        if (!in_cotree[f]) y_faces.push_back(f);
    if (static_cast<int>(x_edges.size()) != genus || static_cast<int>(y_faces.size()) != genus)
        throw std::logic_error("canonical_thickening: curve system counts disagree with genus");

    // Intersection pairing: the y-curve of face f crosses the x-meridian of
    // edge e once per occurrence of e in the boundary of f, signed by the
    // boundary orientation.
    HeegaardDiagram d;
    d.rep = HeegaardDiagram::Rep::Incidence;
    d.genus = genus;
    d.incidence.assign(static_cast<size_t>(genus), std::vector<long>(static_cast<size_t>(genus), 0));
    for (size_t yi = 0; yi < y_faces.size(); ++yi) {
        const auto& f = faces[y_faces[yi]];
        // Boundary of the oriented triangle (f0, f1, f2): edges (f0,f1),
        // (f1,f2), (f2,f0) with signs against the increasing edge order.
        const std::array<std::array<int, 2>, 3> bnd{{{f[0], f[1]}, {f[1], f[2]}, {f[2], f[0]}}};
        for (const auto& ab : bnd) {
            int a = ab[0], b = ab[1];
            int sign = +1;
            if (a > b) {
                std::swap(a, b);
                sign = -1;
            }
            const std::array<int, 2> key{a, b};
            for (size_t xi = 0; xi < x_edges.size(); ++xi)
                if (edges[x_edges[xi]] == key)
                    d.incidence[static_cast<size_t>(xi)][static_cast<size_t>(yi)] += sign;
        }
    }
    return d;
}

}  // namespace qtqft
