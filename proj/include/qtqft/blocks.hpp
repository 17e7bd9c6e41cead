#pragma once
/// \file blocks.hpp
/// \brief Striped evaluation of colored curves on surfaces.
///
/// A closed surface carrying an embedded colored link is presented as a
/// *Morse word*: a sequence of elementary blocks (discs, cylinders, pairs of
/// pants, strand births/deaths, crossings) acting on a FIFO list of boundary
/// circles.  Each circle is cut at a marked point and described by the chain
///
///     region_0, strand_1, region_1, ..., strand_n, region_n
///
/// with region_n == region_0 (the mark sits inside one region).  The engine
/// sums exactly over all region labelings, one elementary block at a time,
/// with amplitudes chosen so that every region basis is plain-orthonormal:
/// no square roots appear anywhere.
///
/// The crossing block is diagonalized through the recoupling basis: fuse the
/// two strands, apply the half-twist eigenvalue, fuse back with the strands
/// exchanged.  Reidemeister II holds on the nose because the two change-of-
/// basis matrices are exact inverses; Reidemeister III is the hexagon.
///
/// For closed words the result is the surface partition function with Wilson
/// lines inserted; dividing by the global dimension squared per closed
/// surface component yields the link invariant normalized to
/// <unknot_a> = [d_a] and <empty> = 1.

#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtqft/cyclotomic.hpp"
#include "qtqft/fusion.hpp"

namespace qtqft {

// ---------------------------------------------------------------------------
// Morse words
// ---------------------------------------------------------------------------

/// One elementary block.  `n` is the declared strand count of the circle the
/// block acts on (validated), `k` a 1-based strand position, `m` the second
/// strand count for splits.  `comp` is a 0-based link-component index for
/// blocks that create or check strands; `lit` keeps a literal color used for
/// validation by `cap(c)` in literal words.
struct MorseOp {
    enum Kind { Cup, Cap, TriPlus, TriMinus, Free, CrossPos, CrossNeg, Birth, Death, Coupon0 };
    Kind kind;
    int n = 0;
    int m = 0;
    int k = 0;
    int comp = -1;
    int lit = -1;
};

/// A parsed Morse word.  Literal words list their component colors in
/// creation order; reference words (`components n`) leave coloring to the
/// caller and may carry per-component framings for surgery use.
struct MorseWord {
    int level = 0;
    int ncomponents = 0;
    bool ref_mode = false;
    std::vector<int> colors;     ///< per component; empty for bare ref words
    std::vector<long> framings;  ///< per component; only in surgery words
    std::vector<MorseOp> ops;
};

namespace detail {

inline std::string mw_trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline long mw_long(const std::string& s, const std::string& what, int lineno) {
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty())
        throw std::runtime_error("line " + std::to_string(lineno) + ": expected integer for " + what +
                                 ", got '" + s + "'");
    return v;
}

inline std::vector<std::string> mw_split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(mw_trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(mw_trim(cur));
    return out;
}

}  // namespace detail

/// Parse the `qtqft-format 1` Morse-word text format.  Errors carry the
/// offending line number.
inline MorseWord parse_morse_word(std::istream& in) {
    using detail::mw_long;
    using detail::mw_split;
    using detail::mw_trim;

    MorseWord w;
    int lineno = 0;
    int stage = 0;  // 0: format line, 1: level line, 2: headers/ops
    bool seen_components = false, seen_colors = false, seen_framings = false, seen_op = false;
    std::string raw;

    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = mw_trim(raw);
        if (line.empty()) continue;
        // Full-line comments only: '#' also marks component references.
        if (line[0] == '#') continue;

        if (stage == 0) {
            if (line != "qtqft-format 1") fail("expected 'qtqft-format 1'");
            stage = 1;
            continue;
        }
        if (stage == 1) {
            if (line.rfind("level", 0) != 0) fail("expected 'level <k>'");
            long k = mw_long(mw_trim(line.substr(5)), "level", lineno);
            if (k < 1 || k > 24) fail("level out of range 1..24");
            w.level = static_cast<int>(k);
            stage = 2;
            continue;
        }

        // Header lines.
        if (line.rfind("components", 0) == 0) {
            if (seen_op) fail("'components' must precede blocks");
            if (seen_components) fail("duplicate 'components'");
            long n = mw_long(mw_trim(line.substr(10)), "components", lineno);
            if (n < 1 || n > 64) fail("components out of range 1..64");
            w.ncomponents = static_cast<int>(n);
            w.ref_mode = true;
            seen_components = true;
            continue;
        }
        if (line.rfind("colors", 0) == 0) {
            if (seen_op) fail("'colors' must precede blocks");
            if (seen_colors) fail("duplicate 'colors'");
            for (const std::string& tok : mw_split(mw_trim(line.substr(6)), ','))
                w.colors.push_back(static_cast<int>(mw_long(tok, "color", lineno)));
            seen_colors = true;
            continue;
        }
        if (line.rfind("framings", 0) == 0) {
            if (seen_op) fail("'framings' must precede blocks");
            if (seen_framings) fail("duplicate 'framings'");
            for (const std::string& tok : mw_split(mw_trim(line.substr(8)), ','))
                w.framings.push_back(mw_long(tok, "framing", lineno));
            seen_framings = true;
            continue;
        }

        // Block line: name or name(arg, ...).
        seen_op = true;
        std::string name = line;
        std::vector<std::string> args;
        size_t par = line.find('(');
        if (par != std::string::npos) {
            if (line.back() != ')') fail("missing ')'");
            name = mw_trim(line.substr(0, par));
            std::string inside = line.substr(par + 1, line.size() - par - 2);
            if (!mw_trim(inside).empty()) args = mw_split(inside, ',');
        }

        auto color_arg = [&](const std::string& tok) -> MorseOp {
            MorseOp op{};
            if (!tok.empty() && tok[0] == '#') {
                if (!w.ref_mode) fail("component references need a 'components' header");
                long j = mw_long(tok.substr(1), "component reference", lineno);
                if (j < 1 || j > w.ncomponents) fail("component reference out of range");
                op.comp = static_cast<int>(j - 1);
            } else {
                if (w.ref_mode) fail("literal colors are not allowed after 'components'; use #j");
                long c = mw_long(tok, "color", lineno);
                if (c < 0 || c > w.level) fail("color out of range 0..level");
                op.lit = static_cast<int>(c);
            }
            return op;
        };
        auto int_arg = [&](size_t i, const char* what) -> int {
            return static_cast<int>(mw_long(args.at(i), what, lineno));
        };
        auto expect_args = [&](size_t count) -> void {
            if (args.size() != count)
                fail("'" + name + "' takes " + std::to_string(count) + " argument(s)");
        };

        MorseOp op{};
        if (name == "cup" || name == "cap") {
            op.kind = (name == "cup") ? MorseOp::Cup : MorseOp::Cap;
            if (!args.empty()) {
                expect_args(1);
                MorseOp colored = color_arg(args[0]);
                op.comp = colored.comp;
                op.lit = colored.lit;
                if (op.kind == MorseOp::Cup && op.lit >= 0) {
                    op.comp = static_cast<int>(w.colors.size());
                    w.colors.push_back(op.lit);
                    ++w.ncomponents;
                }
            }
        } else if (name == "tri+") {
            expect_args(2);
            op.kind = MorseOp::TriPlus;
            op.n = int_arg(0, "strand count");
            op.m = int_arg(1, "strand count");
            if (op.n < 0 || op.m < 0) fail("tri+ strand counts must be nonnegative");
        } else if (name == "tri-") {
            expect_args(0);
            op.kind = MorseOp::TriMinus;
        } else if (name == "free") {
            expect_args(1);
            op.kind = MorseOp::Free;
            op.n = int_arg(0, "strand count");
        } else if (name == "X+" || name == "X-") {
            expect_args(2);
            op.kind = (name == "X+") ? MorseOp::CrossPos : MorseOp::CrossNeg;
            op.n = int_arg(0, "strand count");
            op.k = int_arg(1, "position");
            if (op.n < 2 || op.k < 1 || op.k > op.n - 1) fail("crossing position out of range");
        } else if (name == "birth") {
            expect_args(3);
            op.kind = MorseOp::Birth;
            op.n = int_arg(0, "strand count");
            op.k = int_arg(1, "position");
            if (op.k < 1 || op.k > op.n + 1) fail("birth position out of range");
            MorseOp colored = color_arg(args[2]);
            op.comp = colored.comp;
            op.lit = colored.lit;
            if (op.lit >= 0) {
                op.comp = static_cast<int>(w.colors.size());
                w.colors.push_back(op.lit);
                ++w.ncomponents;
            }
        } else if (name == "death") {
            expect_args(2);
            op.kind = MorseOp::Death;
            op.n = int_arg(0, "strand count");
            op.k = int_arg(1, "position");
            if (op.n < 2 || op.k < 1 || op.k > op.n - 1) fail("death position out of range");
        } else if (name == "coupon0") {
            expect_args(2);
            op.kind = MorseOp::Coupon0;
            op.n = int_arg(0, "strand count");
            op.k = int_arg(1, "position");
            if (op.n < 2 || op.k < 1 || op.k > op.n - 1) fail("coupon0 position out of range");
        } else {
            fail("unknown block '" + name + "'");
        }
        w.ops.push_back(op);
    }

    if (stage < 2) throw std::runtime_error("line " + std::to_string(lineno) + ": truncated header");
    if (w.ref_mode) {
        if (!w.colors.empty() && static_cast<int>(w.colors.size()) != w.ncomponents)
            throw std::runtime_error("colors list does not match component count");
        if (!w.framings.empty() && static_cast<int>(w.framings.size()) != w.ncomponents)
            throw std::runtime_error("framings list does not match component count");
        for (int c : w.colors)
            if (c < 0 || c > w.level) throw std::runtime_error("color out of range 0..level");
    } else if (!w.framings.empty()) {
        throw std::runtime_error("framings need a 'components' header");
    }
    return w;
}

inline MorseWord parse_morse_word(const std::string& text) {
    std::istringstream in(text);
    return parse_morse_word(in);
}

/// Canonical printer; parse(format(w)) reproduces w.
inline std::string format_morse_word(const MorseWord& w) {
    std::ostringstream out;
    out << "qtqft-format 1\n";
    out << "level " << w.level << "\n";
    if (w.ref_mode) {
        out << "components " << w.ncomponents << "\n";
        if (!w.colors.empty()) {
            out << "colors ";
            for (size_t i = 0; i < w.colors.size(); ++i) out << (i ? "," : "") << w.colors[i];
            out << "\n";
        }
        if (!w.framings.empty()) {
            out << "framings ";
            for (size_t i = 0; i < w.framings.size(); ++i) out << (i ? "," : "") << w.framings[i];
            out << "\n";
        }
    }
    auto comp_ref = [&](const MorseOp& op) -> std::string {
        if (w.ref_mode) return "#" + std::to_string(op.comp + 1);
        return std::to_string(op.lit);
    };
    for (const MorseOp& op : w.ops) {
        switch (op.kind) {
            case MorseOp::Cup:
                out << (op.comp >= 0 || op.lit >= 0 ? "cup(" + comp_ref(op) + ")" : "cup");
                break;
            case MorseOp::Cap:
                out << (op.comp >= 0 || op.lit >= 0 ? "cap(" + comp_ref(op) + ")" : "cap");
                break;
            case MorseOp::TriPlus:
                out << "tri+(" << op.n << "," << op.m << ")";
                break;
            case MorseOp::TriMinus:
                out << "tri-";
                break;
            case MorseOp::Free:
                out << "free(" << op.n << ")";
                break;
            case MorseOp::CrossPos:
                out << "X+(" << op.n << "," << op.k << ")";
                break;
            case MorseOp::CrossNeg:
                out << "X-(" << op.n << "," << op.k << ")";
                break;
            case MorseOp::Birth:
                out << "birth(" << op.n << "," << op.k << "," << comp_ref(op) << ")";
                break;
            case MorseOp::Death:
                out << "death(" << op.n << "," << op.k << ")";
                break;
            case MorseOp::Coupon0:
                out << "coupon0(" << op.n << "," << op.k << ")";
                break;
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Result of a closed-word evaluation: the raw surface amplitude plus the
/// diagram combinatorics needed for framing corrections downstream.
struct EvalResult {
    CycNum value;
    int closed_surfaces = 0;                   ///< connected closed surface components
    std::vector<long> writhe;                  ///< per link component: signed self-crossings
    std::vector<std::vector<long>> cross_sum;  ///< signed crossing count between components
};

class BlocksEngine {
  public:
    explicit BlocksEngine(int level) : fd_(level), d2_inv_(cyc_inv(fd_.global_dim_sq())) {}

    const FusionData& fusion() const { return fd_; }

    /// Channel phase of a crossing in the diagrammatic gauge used by the
    /// recoupling data: the two strands x, y braid over the fusion channel g
    /// with eigenvalue (-1)^{(x+y-g)/2} A^{s(x(x+2)+y(y+2)-g(g+2))/2} where
    /// A = zeta^{r-1} is the loop variable of the skein normalization.  This
    /// is the phase compatible with the square-root-free six-j symbols; the
    /// representation-theoretic half-braiding lambda_sqrt differs from it by
    /// a vertex gauge and is recovered in link_invariant via the framing and
    /// linking corrections.
    CycNum half_twist(int x, int y, int g, int sign) const {
        long e = static_cast<long>(x) * (x + 2) + static_cast<long>(y) * (y + 2) -
                 static_cast<long>(g) * (g + 2);
        long r = fd_.order() / 4;
        CycNum out = cyc_from_power(sign * (r - 1) * (e / 2), fd_.order());
        if (((x + y - g) / 2) % 2 != 0) out = cyc_neg(out);
        return out;
    }

    /// Crossing block matrix element: strands x (left) and y (right) over
    /// middle region M between outer regions L and R exchange to (y, x) with
    /// new middle region Mp.  sign selects over/under.
    const CycNum& crossing_kernel(int L, int x, int M, int y, int R, int Mp, int sign) {
        std::array<int, 7> key{L, x, M, y, R, Mp, sign};
        auto it = kernel_cache_.find(key);
        if (it != kernel_cache_.end()) return it->second;
        CycNum val = cyc_zero(fd_.order());
        if (fd_.admissible(L, x, M) && fd_.admissible(M, y, R) && fd_.admissible(L, y, Mp) &&
            fd_.admissible(Mp, x, R)) {
            for (int g : fd_.fusion_range(x, y)) {
                if (!fd_.admissible(L, g, R)) continue;
                CycNum term = cyc_mul(fd_.sixj(L, x, M, y, R, g),
                                      cyc_mul(half_twist(x, y, g, sign),
                                              fd_.sixj_inv(L, y, Mp, x, R, g)));
                val = cyc_add(val, term);
            }
        }
        return kernel_cache_.emplace(key, std::move(val)).first->second;
    }

    /// Evaluate a closed Morse word exactly.  `coloring` assigns a color to
    /// each component and defaults to the word's own color list.
    EvalResult evaluate_closed(const MorseWord& w, const std::vector<int>& coloring = {}) {
        if (w.level != fd_.level())
            throw std::invalid_argument("evaluate_closed: word level does not match engine level");
        std::vector<int> col = coloring.empty() ? w.colors : coloring;
        if (static_cast<int>(col.size()) != w.ncomponents)
            throw std::invalid_argument("evaluate_closed: coloring size does not match components");
        for (int c : col)
            if (c < 0 || c > fd_.level())
                throw std::invalid_argument("evaluate_closed: color out of range");

        // ---- symbolic pass: strand bookkeeping, validation, crossing signs.
        struct Strand {
            int comp;
            int dir;  // +1 up, -1 down
        };
        std::vector<std::vector<Strand>> circles;  // FIFO: index 0 = front
        std::vector<int> surf_of_circle;           // surface-component id per circle
        std::vector<int> uf_parent;                // union-find over surface ids
        std::vector<int> live_circles_of;          // live circle count per root (index by id)
        int finished_surfaces = 0;

        auto uf_find = [&](int x) -> int {
            while (uf_parent[static_cast<size_t>(x)] != x) x = uf_parent[static_cast<size_t>(x)];
            return x;
        };
        auto uf_union = [&](int a, int b) -> void {
            a = uf_find(a);
            b = uf_find(b);
            if (a == b) return;
            if (b < a) std::swap(a, b);
            uf_parent[static_cast<size_t>(b)] = a;
            live_circles_of[static_cast<size_t>(a)] += live_circles_of[static_cast<size_t>(b)];
            live_circles_of[static_cast<size_t>(b)] = 0;
        };

        EvalResult res;
        res.writhe.assign(static_cast<size_t>(w.ncomponents), 0);
        res.cross_sum.assign(static_cast<size_t>(w.ncomponents),
                             std::vector<long>(static_cast<size_t>(w.ncomponents), 0));

        // Per-op annotations consumed by the amplitude pass.
        struct Ann {
            int c1 = -1;  // resolved colors involved
            int c2 = -1;
        };
        std::vector<Ann> ann(w.ops.size());

        auto op_fail = [&](size_t idx, const std::string& msg) -> void {
            throw std::invalid_argument("block " + std::to_string(idx + 1) + ": " + msg);
        };
        auto strand_color = [&](const Strand& s) -> int { return col[static_cast<size_t>(s.comp)]; };

        for (size_t idx = 0; idx < w.ops.size(); ++idx) {
            const MorseOp& op = w.ops[idx];
            switch (op.kind) {
                case MorseOp::Cup: {
                    std::vector<Strand> c;
                    if (op.comp >= 0) c = {{op.comp, -1}, {op.comp, +1}};
                    circles.push_back(std::move(c));
                    int id = static_cast<int>(uf_parent.size());
                    uf_parent.push_back(id);
                    live_circles_of.push_back(1);
                    surf_of_circle.push_back(id);
                    break;
                }
                case MorseOp::Cap: {
                    if (circles.empty()) op_fail(idx, "cap with no open circle");
                    const auto& c = circles.front();
                    if (op.comp >= 0 || op.lit >= 0) {
                        if (c.size() != 2) op_fail(idx, "colored cap needs exactly two strands");
                        if (c[0].comp != c[1].comp) op_fail(idx, "cap joins different components");
                        if (c[0].dir + c[1].dir != 0) op_fail(idx, "cap joins parallel strands");
                        int expect = op.comp >= 0 ? col[static_cast<size_t>(op.comp)] : op.lit;
                        if (op.comp >= 0 && c[0].comp != op.comp)
                            op_fail(idx, "cap component reference does not match circle");
                        if (strand_color(c[0]) != expect) op_fail(idx, "cap color does not match circle");
                        ann[idx].c1 = strand_color(c[0]);
                    } else if (!c.empty()) {
                        op_fail(idx, "plain cap on a circle with strands");
                    }
                    int root = uf_find(surf_of_circle.front());
                    if (--live_circles_of[static_cast<size_t>(root)] == 0) ++finished_surfaces;
                    circles.erase(circles.begin());
                    surf_of_circle.erase(surf_of_circle.begin());
                    break;
                }
                case MorseOp::TriPlus: {
                    if (circles.empty()) op_fail(idx, "tri+ with no open circle");
                    auto& c = circles.front();
                    if (static_cast<int>(c.size()) != op.n + op.m)
                        op_fail(idx, "tri+ strand count mismatch");
                    std::vector<Strand> a(c.begin(), c.begin() + op.n);
                    std::vector<Strand> b(c.begin() + op.n, c.end());
                    int surf = surf_of_circle.front();
                    live_circles_of[static_cast<size_t>(uf_find(surf))] += 1;
                    circles.erase(circles.begin());
                    surf_of_circle.erase(surf_of_circle.begin());
                    circles.insert(circles.begin(), std::move(b));
                    circles.insert(circles.begin(), std::move(a));
                    surf_of_circle.insert(surf_of_circle.begin(), surf);
                    surf_of_circle.insert(surf_of_circle.begin(), surf);
                    break;
                }
                case MorseOp::TriMinus: {
                    if (circles.size() < 2) op_fail(idx, "tri- needs two open circles");
                    std::vector<Strand> merged = circles[0];
                    merged.insert(merged.end(), circles[1].begin(), circles[1].end());
                    int sa = surf_of_circle[0], sb = surf_of_circle[1];
                    uf_union(sa, sb);
                    live_circles_of[static_cast<size_t>(uf_find(sa))] -= 1;
                    circles.erase(circles.begin(), circles.begin() + 2);
                    surf_of_circle.erase(surf_of_circle.begin(), surf_of_circle.begin() + 2);
                    circles.insert(circles.begin(), std::move(merged));
                    surf_of_circle.insert(surf_of_circle.begin(), uf_find(sa));
                    break;
                }
                case MorseOp::Free: {
                    if (circles.empty()) op_fail(idx, "free with no open circle");
                    if (static_cast<int>(circles.front().size()) != op.n)
                        op_fail(idx, "free strand count mismatch");
                    break;
                }
                case MorseOp::CrossPos:
                case MorseOp::CrossNeg: {
                    if (circles.empty()) op_fail(idx, "crossing with no open circle");
                    auto& c = circles.front();
                    if (static_cast<int>(c.size()) != op.n) op_fail(idx, "crossing strand count mismatch");
                    Strand& s1 = c[static_cast<size_t>(op.k - 1)];
                    Strand& s2 = c[static_cast<size_t>(op.k)];
                    ann[idx].c1 = strand_color(s1);
                    ann[idx].c2 = strand_color(s2);
                    // Crossing sign: anchored so that an X+ curl over a cup
                    // (antiparallel legs) is a +1 kink, matching the curl
                    // factor the crossing kernel produces.
                    long eps = (op.kind == MorseOp::CrossPos ? -1 : 1) *
                               static_cast<long>(s1.dir) * static_cast<long>(s2.dir);
                    if (s1.comp == s2.comp) {
                        res.writhe[static_cast<size_t>(s1.comp)] += eps;
                    } else {
                        res.cross_sum[static_cast<size_t>(s1.comp)][static_cast<size_t>(s2.comp)] += eps;
                        res.cross_sum[static_cast<size_t>(s2.comp)][static_cast<size_t>(s1.comp)] += eps;
                    }
                    std::swap(s1, s2);
                    break;
                }
                case MorseOp::Birth: {
                    if (circles.empty()) op_fail(idx, "birth with no open circle");
                    auto& c = circles.front();
                    if (static_cast<int>(c.size()) != op.n) op_fail(idx, "birth strand count mismatch");
                    ann[idx].c1 = col[static_cast<size_t>(op.comp)];
                    c.insert(c.begin() + (op.k - 1), {Strand{op.comp, -1}, Strand{op.comp, +1}});
                    break;
                }
                case MorseOp::Death:
                case MorseOp::Coupon0: {
                    if (circles.empty()) op_fail(idx, "death with no open circle");
                    auto& c = circles.front();
                    if (static_cast<int>(c.size()) != op.n) op_fail(idx, "death strand count mismatch");
                    const Strand& s1 = c[static_cast<size_t>(op.k - 1)];
                    const Strand& s2 = c[static_cast<size_t>(op.k)];
                    if (s1.comp != s2.comp) op_fail(idx, "death joins different components");
                    if (s1.dir + s2.dir != 0) op_fail(idx, "death joins parallel strands");
                    ann[idx].c1 = strand_color(s1);
                    if (op.kind == MorseOp::Death)
                        c.erase(c.begin() + (op.k - 1), c.begin() + (op.k + 1));
                    break;
                }
            }
        }
        if (!circles.empty()) throw std::invalid_argument("evaluate_closed: word leaves open circles");
        res.closed_surfaces = finished_surfaces;

        // ---- amplitude pass over region labelings.
        using State = std::vector<std::vector<int>>;  // regions per circle, front first
        std::map<State, CycNum> states;
        states.emplace(State{}, cyc_one(fd_.order()));
        const int nlab = fd_.level() + 1;

        auto add_to = [&](std::map<State, CycNum>& m, State s, const CycNum& a) -> void {
            auto it = m.find(s);
            if (it == m.end())
                m.emplace(std::move(s), a);
            else
                it->second = cyc_add(it->second, a);
        };

        for (size_t idx = 0; idx < w.ops.size(); ++idx) {
            const MorseOp& op = w.ops[idx];
            std::map<State, CycNum> next;
            for (const auto& [st, amp] : states) {
                switch (op.kind) {
                    case MorseOp::Cup: {
                        if (op.comp < 0) {
                            for (int b = 0; b < nlab; ++b) {
                                State s = st;
                                s.push_back({b});
                                add_to(next, std::move(s), cyc_mul(amp, fd_.qdim(b)));
                            }
                        } else {
                            // A colored cup is a plain cup carrying a strand
                            // pair: disc weight [d_b] times the cup vector
                            // [d_bp]/theta(b,a,bp), the left eigenvector of
                            // the crossing kernel.
                            int a = col[static_cast<size_t>(op.comp)];
                            for (int b = 0; b < nlab; ++b)
                                for (int bp = 0; bp < nlab; ++bp) {
                                    if (!fd_.admissible(b, a, bp)) continue;
                                    State s = st;
                                    s.push_back({b, bp, b});
                                    CycNum c = cyc_mul(fd_.qdim(b),
                                                       cyc_div(fd_.qdim(bp), fd_.theta(b, a, bp)));
                                    add_to(next, std::move(s), cyc_mul(amp, c));
                                }
                        }
                        break;
                    }
                    case MorseOp::Cap: {
                        const auto& r = st.front();
                        State s(st.begin() + 1, st.end());
                        // Colored cap: the dual pairing theta(b,a,M) absorbs
                        // the strand pair and the disc; plain cap: [d_b].
                        CycNum c = (ann[idx].c1 >= 0 && r.size() == 3)
                                       ? fd_.theta(r[0], ann[idx].c1, r[1])
                                       : fd_.qdim(r.front());
                        add_to(next, std::move(s), cyc_mul(amp, c));
                        break;
                    }
                    case MorseOp::TriPlus: {
                        const auto& r = st.front();
                        int g0 = r.front();
                        if (r[static_cast<size_t>(op.n)] != g0) break;  // crotch region mismatch
                        State s;
                        s.reserve(st.size() + 1);
                        std::vector<int> a(r.begin(), r.begin() + op.n + 1);
                        std::vector<int> b(r.begin() + op.n, r.end());
                        s.push_back(std::move(a));
                        s.push_back(std::move(b));
                        s.insert(s.end(), st.begin() + 1, st.end());
                        add_to(next, std::move(s), cyc_mul(amp, fd_.qdim_inv(g0)));
                        break;
                    }
                    case MorseOp::TriMinus: {
                        const auto& ra = st[0];
                        const auto& rb = st[1];
                        if (ra.front() != rb.front()) break;
                        std::vector<int> merged(ra.begin(), ra.end());
                        merged.insert(merged.end(), rb.begin() + 1, rb.end());
                        State s;
                        s.reserve(st.size() - 1);
                        s.push_back(std::move(merged));
                        s.insert(s.end(), st.begin() + 2, st.end());
                        add_to(next, std::move(s), cyc_mul(amp, fd_.qdim_inv(ra.front())));
                        break;
                    }
                    case MorseOp::Free: {
                        add_to(next, st, amp);
                        break;
                    }
                    case MorseOp::CrossPos:
                    case MorseOp::CrossNeg: {
                        const auto& r = st.front();
                        int L = r[static_cast<size_t>(op.k - 1)];
                        int M = r[static_cast<size_t>(op.k)];
                        int R = r[static_cast<size_t>(op.k + 1)];
                        int x = ann[idx].c1, y = ann[idx].c2;
                        int sgn = op.kind == MorseOp::CrossPos ? +1 : -1;
                        for (int Mp = 0; Mp < nlab; ++Mp) {
                            if (!fd_.admissible(L, y, Mp) || !fd_.admissible(Mp, x, R)) continue;
                            const CycNum& kern = crossing_kernel(L, x, M, y, R, Mp, sgn);
                            if (kern.is_zero()) continue;
                            State s = st;
                            s.front()[static_cast<size_t>(op.k)] = Mp;
                            add_to(next, std::move(s), cyc_mul(amp, kern));
                        }
                        break;
                    }
                    case MorseOp::Birth: {
                        // Cup vector in region g: [d_bp]/theta(g,a,bp).
                        const auto& r = st.front();
                        int g = r[static_cast<size_t>(op.k - 1)];
                        int a = ann[idx].c1;
                        for (int bp = 0; bp < nlab; ++bp) {
                            if (!fd_.admissible(g, a, bp)) continue;
                            State s = st;
                            auto& rr = s.front();
                            rr.insert(rr.begin() + op.k, {bp, g});
                            add_to(next, std::move(s),
                                   cyc_mul(amp, cyc_div(fd_.qdim(bp), fd_.theta(g, a, bp))));
                        }
                        break;
                    }
                    case MorseOp::Death: {
                        // Dual cap vector: theta(g,a,M)/[d_g].
                        const auto& r = st.front();
                        int g = r[static_cast<size_t>(op.k - 1)];
                        if (r[static_cast<size_t>(op.k + 1)] != g) break;
                        int a = ann[idx].c1;
                        int m = r[static_cast<size_t>(op.k)];
                        State s = st;
                        auto& rr = s.front();
                        rr.erase(rr.begin() + op.k, rr.begin() + op.k + 2);
                        add_to(next, std::move(s),
                               cyc_mul(amp, cyc_div(fd_.theta(g, a, m), fd_.qdim(g))));
                        break;
                    }
                    case MorseOp::Coupon0: {
                        // Vacuum coupon: cap then cup through the trivial
                        // channel, normalized by the loop value.
                        const auto& r = st.front();
                        int g = r[static_cast<size_t>(op.k - 1)];
                        if (r[static_cast<size_t>(op.k + 1)] != g) break;
                        int a = ann[idx].c1;
                        int m = r[static_cast<size_t>(op.k)];
                        CycNum base = cyc_mul(amp, cyc_div(fd_.theta(g, a, m),
                                                           cyc_mul(fd_.qdim(g), fd_.qdim(a))));
                        for (int bp = 0; bp < nlab; ++bp) {
                            if (!fd_.admissible(g, a, bp)) continue;
                            State s = st;
                            s.front()[static_cast<size_t>(op.k)] = bp;
                            add_to(next, std::move(s),
                                   cyc_mul(base, cyc_div(fd_.qdim(bp), fd_.theta(g, a, bp))));
                        }
                        break;
                    }
                }
            }
            states = std::move(next);
        }

        CycNum total = cyc_zero(fd_.order());
        for (const auto& [st, amp] : states)
            if (st.empty()) total = cyc_add(total, amp);
        res.value = std::move(total);
        return res;
    }

    /// Link invariant of the blackboard-framed colored link presented by the
    /// word: the closed amplitude divided by D^2 per closed surface
    /// component, then carried from the diagrammatic gauge to the ribbon
    /// normalization.  A curl changes the result by exactly one twist
    /// factor, an unknot colored a gives [d_a], and the positively linked
    /// Hopf link gives the unnormalized S-matrix entry.
    ///
    /// The gauge transport multiplies each component by
    /// (v_a / mu_a)^{writhe} with mu_a = (-1)^a A^{a(a+2)} the diagrammatic
    /// curl factor, and each pair of components by (-1)^{a_i a_j lk_ij}; both
    /// exponents come from the crossing bookkeeping of evaluate_closed.
    CycNum link_invariant(const MorseWord& w, const std::vector<int>& coloring = {}) {
        EvalResult r = evaluate_closed(w, coloring);
        CycNum v = r.value;
        for (int i = 0; i < r.closed_surfaces; ++i) v = cyc_mul(v, d2_inv_);
        const std::vector<int>& col = coloring.empty() ? w.colors : coloring;
        const long r4 = fd_.order() / 4;
        for (std::size_t i = 0; i < r.writhe.size(); ++i) {
            const long a = col.at(i);
            // phi_a = v_a / mu_a = (-1)^a zeta^{(2-r) a(a+2)}
            CycNum phi = cyc_from_power((2 - r4) * a * (a + 2) * r.writhe[i], fd_.order());
            if ((a % 2) != 0 && (r.writhe[i] % 2) != 0) phi = cyc_neg(phi);
            v = cyc_mul(v, phi);
        }
        for (std::size_t i = 0; i < r.cross_sum.size(); ++i)
            for (std::size_t j = i + 1; j < r.cross_sum[i].size(); ++j) {
                const long lk = r.cross_sum[i][j] / 2;
                if ((col.at(i) % 2) != 0 && (col.at(j) % 2) != 0 && (lk % 2) != 0)
                    v = cyc_neg(v);
            }
        return v;
    }

  private:
    FusionData fd_;
    CycNum d2_inv_;
    std::map<std::array<int, 7>, CycNum> kernel_cache_;
};

// ---------------------------------------------------------------------------
// Surface partition functions
// ---------------------------------------------------------------------------

/// Morse word for a bare genus-g surface: a disc, g handle pairs, a disc.
inline MorseWord genus_word(int level, int genus) {
    if (genus < 0) throw std::invalid_argument("genus_word: negative genus");
    MorseWord w;
    w.level = level;
    w.ops.push_back({MorseOp::Cup, 0, 0, 0, -1, -1});
    for (int i = 0; i < genus; ++i) {
        w.ops.push_back({MorseOp::TriPlus, 0, 0, 0, -1, -1});
        w.ops.push_back({MorseOp::TriMinus, 0, 0, 0, -1, -1});
    }
    w.ops.push_back({MorseOp::Cap, 0, 0, 0, -1, -1});
    return w;
}

/// Exact partition function of the closed genus-g surface:
/// sum_a [d_a]^{2-2g}.  Computed through the block engine.
inline CycNum surface_partition(BlocksEngine& eng, int genus) {
    return eng.evaluate_closed(genus_word(eng.fusion().level(), genus)).value;
}

/// Heat-kernel deformation of the genus-g partition function at inverse
/// temperature beta and total area `area`: each label is damped by
/// exp(-area * C_a / (2 beta)) with C_a = a(a+2)/2.  Converges to the exact
/// value as beta -> infinity.
inline double heat_kernel_partition(const FusionData& fd, int genus, double area, double beta) {
    double z = 0.0;
    for (int a = 0; a <= fd.level(); ++a) {
        double d = cyc_to_float(fd.qdim(a));
        double casimir = 0.5 * static_cast<double>(a) * static_cast<double>(a + 2);
        z += std::pow(d, 2.0 - 2.0 * genus) * std::exp(-area * casimir / (2.0 * beta));
    }
    return z;
}

}  // namespace qtqft
