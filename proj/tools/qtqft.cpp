/// \file qtqft.cpp
/// \brief Command-line front end: parse input files, dispatch to the fusion,
/// block-engine, and three-manifold layers, and emit exact+float results.
///
/// Output contract: results go to stdout, errors go to stderr as a single
/// JSON object (parse errors carry the offending line number) with a nonzero
/// exit code.  JSON output is byte-deterministic given identical inputs and
/// flags: object keys are sorted, floats are printed with 12 significant
/// digits, and no timing field is emitted unless --timing is passed.

#include <CLI11.hpp>

#include <chrono>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtqft/blocks.hpp"
#include "qtqft/cyclotomic.hpp"
#include "qtqft/fusion.hpp"
#include "qtqft/identities.hpp"
#include "qtqft/oracle.hpp"
#include "qtqft/threemfld.hpp"

namespace qtqft {
namespace cli {

// ---------------------------------------------------------------------------
// Deterministic JSON emission
// ---------------------------------------------------------------------------

/// Minimal JSON value with deterministic serialization: object keys are kept
/// sorted (std::map) and floats are always formatted "%.12g".  A ready-made
/// serializer is deliberately not used for output, because shortest-round-trip
/// double formatting would break the fixed-12-digit output contract.
struct Json {
    enum Kind { Null, Bool, Int, Float, Str, Arr, Obj };
    Kind kind = Null;
    bool b = false;
    long long i = 0;
    double f = 0.0;
    std::string s;
    std::vector<Json> arr;
    std::map<std::string, Json> obj;

    Json() = default;
    Json(bool v) : kind(Bool), b(v) {}
    Json(int v) : kind(Int), i(v) {}
    Json(long v) : kind(Int), i(v) {}
    Json(long long v) : kind(Int), i(v) {}
    Json(double v) : kind(Float), f(v) {}
    Json(const char* v) : kind(Str), s(v) {}
    Json(std::string v) : kind(Str), s(std::move(v)) {}
    static Json array() {
        Json j;
        j.kind = Arr;
        return j;
    }
    static Json object() {
        Json j;
        j.kind = Obj;
        return j;
    }
    Json& operator[](const std::string& key) {
        kind = Obj;
        return obj[key];
    }
    void push_back(Json v) {
        kind = Arr;
        arr.push_back(std::move(v));
    }
};

inline std::string fmt_double(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void json_escape(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            case '\r': os << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(c));
                    os << buf;
                } else {
                    os << c;
                }
        }
    }
    os << '"';
}

inline void json_dump(std::ostream& os, const Json& j, int indent) {
    switch (j.kind) {
        case Json::Null: os << "null"; break;
        case Json::Bool: os << (j.b ? "true" : "false"); break;
        case Json::Int: os << j.i; break;
        case Json::Float: os << fmt_double(j.f); break;
        case Json::Str: json_escape(os, j.s); break;
        case Json::Arr: {
            if (j.arr.empty()) {
                os << "[]";
                break;
            }
            bool scalar_only = true;
            for (const Json& v : j.arr)
                if (v.kind == Json::Arr || v.kind == Json::Obj) scalar_only = false;
            if (scalar_only) {  // leaf arrays stay on one line
                os << '[';
                for (size_t i = 0; i < j.arr.size(); ++i) {
                    if (i) os << ", ";
                    json_dump(os, j.arr[i], indent);
                }
                os << ']';
                break;
            }
            const std::string pad(static_cast<size_t>(indent + 1) * 2, ' ');
            os << "[\n";
            for (size_t i = 0; i < j.arr.size(); ++i) {
                os << pad;
                json_dump(os, j.arr[i], indent + 1);
                if (i + 1 < j.arr.size()) os << ',';
                os << '\n';
            }
            os << std::string(static_cast<size_t>(indent) * 2, ' ') << ']';
            break;
        }
        case Json::Obj: {
            if (j.obj.empty()) {
                os << "{}";
                break;
            }
            const std::string pad(static_cast<size_t>(indent + 1) * 2, ' ');
            os << "{\n";
            size_t i = 0;
            for (const auto& [k, v] : j.obj) {
                os << pad;
                json_escape(os, k);
                os << ": ";
                json_dump(os, v, indent + 1);
                if (++i < j.obj.size()) os << ',';
                os << '\n';
            }
            os << std::string(static_cast<size_t>(indent) * 2, ' ') << '}';
            break;
        }
    }
}

/// Full serialization of one exact value: power-basis coefficients as reduced
/// "num/den" strings plus the order, with the float embedding alongside.
inline Json cyc_json(const CycNum& v) {
    Json e = Json::object();
    Json coeffs = Json::array();
    for (const auto& q : v.c) coeffs.push_back(q.get_str());
    const std::complex<double> z = cyc_to_complex(v);
    e["coeffs"] = std::move(coeffs);
    e["float"] = z.real();
    e["float_imag"] = z.imag();
    e["order"] = v.order;
    e["string"] = cyc_to_string(v);
    return e;
}

/// Common envelope of every invariant result.
inline Json result_json(int level, const CycNum& value) {
    Json j = Json::object();
    const std::complex<double> z = cyc_to_complex(value);
    j["qtqft-format"] = 1;
    j["level"] = level;
    j["exact"] = cyc_json(value);
    j["float"] = z.real();
    j["float_imag"] = z.imag();
    return j;
}

inline std::string value_text(const CycNum& v) {
    const std::complex<double> z = cyc_to_complex(v);
    std::string out = "value  = " + cyc_to_string(v) + "\n";
    out += "float  = " + fmt_double(z.real());
    if (z.imag() != 0.0) out += " + " + fmt_double(z.imag()) + "*i";
    out += "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration and plumbing
// ---------------------------------------------------------------------------

/// Everything the subcommands read; filled by the argument parser.
struct RunConfig {
    int level = 0;               ///< fusion level (1..16 at the CLI surface)
    std::string subcommand;      ///< resolved subcommand name, for error reports
    std::string input_path;      ///< input file, where the subcommand takes one
    std::string format = "json"; ///< "json" or "text"
    double beta = 0.0;           ///< heat-kernel inverse temperature (0 = off)
    double area = 1.0;           ///< heat-kernel surface area
    int genus = 0;
    std::vector<int> colors;     ///< coloring override (twice-spins)
    int twice_spin = 1;          ///< oracle braid: strand label
    int channel = 0;             ///< oracle braid: fusion channel
    bool inverse = false;        ///< oracle braid: use the inverse braiding
    unsigned long seed = 0;      ///< randomized suites
    long count = 64;             ///< randomized suites: sample count
    bool timing = false;         ///< append runtime_seconds to the output
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void check_level(int level) {
    if (level < 1 || level > 16)
        throw std::runtime_error("level " + std::to_string(level) + " out of range 1..16");
}

/// Print the result in the requested format; the timing field is opt-in so
/// that default output stays byte-identical across runs.
inline int finish(const RunConfig& rc, Json j, const std::string& text,
                  std::chrono::steady_clock::time_point t0) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rc.format == "text") {
        std::cout << text;
        if (rc.timing) std::cout << "runtime = " << fmt_double(secs) << "s\n";
        return 0;
    }
    if (rc.timing) j["runtime_seconds"] = secs;
    json_dump(std::cout, j, 0);
    std::cout << "\n";
    return 0;
}

/// Structured error channel: one JSON object on stderr, nonzero exit.  Parser
/// and engine messages already carry their position ("line N: ...",
/// "block N: ..."); surface it as a field as well.
inline int fail_structured(const std::string& subcommand, const char* what) {
    Json err = Json::object();
    err["error"] = what;
    if (!subcommand.empty()) err["subcommand"] = subcommand;
    int line = 0, block = 0;
    if (std::sscanf(what, "line %d:", &line) == 1) err["line"] = line;
    else if (std::sscanf(what, "block %d:", &block) == 1) err["block"] = block;
    json_dump(std::cerr, err, 0);
    std::cerr << "\n";
    return 1;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int cmd_fusion_dump(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    FusionData fd(rc.level);
    const int k = rc.level;

    Json j = Json::object();
    j["qtqft-format"] = 1;
    j["level"] = k;
    j["order"] = fd.order();
    j["order2"] = fd.order2();

    Json labels = Json::array();
    for (int a = 0; a <= k; ++a) labels.push_back(a);
    j["labels"] = std::move(labels);

    Json qdim = Json::array(), twist = Json::array(), tdiag = Json::array();
    for (int a = 0; a <= k; ++a) {
        qdim.push_back(cyc_json(fd.qdim(a)));
        twist.push_back(cyc_json(fd.twist(a)));
        tdiag.push_back(cyc_json(fd.tdiag()[static_cast<size_t>(a)]));
    }
    j["qdim"] = std::move(qdim);
    j["twist"] = std::move(twist);
    j["tdiag"] = std::move(tdiag);

    Json adm = Json::array();
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b)
            for (int c = 0; c <= k; ++c)
                if (fd.admissible(a, b, c)) {
                    Json t = Json::array();
                    t.push_back(a);
                    t.push_back(b);
                    t.push_back(c);
                    adm.push_back(std::move(t));
                }
    j["admissible"] = std::move(adm);

    Json smat = Json::array(), smat_un = Json::array();
    for (int a = 0; a <= k; ++a) {
        Json row = Json::array(), row_un = Json::array();
        for (int b = 0; b <= k; ++b) {
            row.push_back(cyc_json(fd.smatrix()[static_cast<size_t>(a)][static_cast<size_t>(b)]));
            row_un.push_back(
                cyc_json(fd.smatrix_unnorm()[static_cast<size_t>(a)][static_cast<size_t>(b)]));
        }
        smat.push_back(std::move(row));
        smat_un.push_back(std::move(row_un));
    }
    j["smatrix"] = std::move(smat);
    j["smatrix_unnorm"] = std::move(smat_un);

    j["total_dim"] = cyc_json(fd.total_dim());
    j["global_dim_sq"] = cyc_json(fd.global_dim_sq());
    j["delta_plus"] = cyc_json(fd.delta_plus());
    j["delta_minus"] = cyc_json(fd.delta_minus());

    std::ostringstream text;
    text << "level " << k << "  (labels are twice-spins 0.." << k << ", order " << fd.order()
         << ")\n";
    text << "label  qdim                 twist\n";
    for (int a = 0; a <= k; ++a) {
        const std::complex<double> tw = cyc_to_complex(fd.twist(a));
        char line[160];
        std::snprintf(line, sizeof line, "%-6d %-20s %s%+gi\n", a,
                      fmt_double(cyc_to_float(fd.qdim(a))).c_str(), fmt_double(tw.real()).c_str(),
                      tw.imag());
        text << line;
    }
    text << "total quantum dimension D = " << fmt_double(cyc_to_float(fd.total_dim())) << "\n";
    text << "S matrix (floats):\n";
    for (int a = 0; a <= k; ++a) {
        text << "  ";
        for (int b = 0; b <= k; ++b)
            text << fmt_double(
                        cyc_to_float(fd.smatrix()[static_cast<size_t>(a)][static_cast<size_t>(b)]))
                 << (b == k ? "\n" : "  ");
    }
    return finish(rc, std::move(j), text.str(), t0);
}

inline int cmd_link_invariant(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    MorseWord w = parse_morse_word(slurp(rc.input_path));
    if (rc.level > 0) w.level = rc.level;  // flag overrides the file header
    check_level(w.level);
    if (!rc.colors.empty() && !w.ref_mode)
        throw std::runtime_error(
            "--color needs a word with a 'components' header; this word carries literal colors");
    BlocksEngine eng(w.level);
    const EvalResult r = eng.evaluate_closed(w, rc.colors);
    const CycNum inv = eng.link_invariant(w, rc.colors);

    Json j = result_json(w.level, inv);
    j["closed_surfaces"] = r.closed_surfaces;
    j["components"] = w.ncomponents;
    Json writhe = Json::array();
    for (long x : r.writhe) writhe.push_back(x);
    j["writhe"] = std::move(writhe);
    Json colors = Json::array();
    const std::vector<int>& col = rc.colors.empty() ? w.colors : rc.colors;
    for (int c : col) colors.push_back(c);
    j["colors"] = std::move(colors);

    std::ostringstream text;
    text << "link invariant at level " << w.level << " (" << w.ncomponents << " components)\n"
         << value_text(inv);
    return finish(rc, std::move(j), text.str(), t0);
}

inline int cmd_surface_z(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    check_level(rc.level);
    BlocksEngine eng(rc.level);
    const CycNum z = surface_partition(eng, rc.genus);

    Json j = result_json(rc.level, z);
    j["genus"] = rc.genus;
    std::ostringstream text;
    text << "genus-" << rc.genus << " partition function at level " << rc.level << "\n"
         << value_text(z);
    if (rc.beta > 0.0) {
        const double hk = heat_kernel_partition(eng.fusion(), rc.genus, rc.area, rc.beta);
        j["heat_kernel"] = hk;
        j["beta"] = rc.beta;
        j["area"] = rc.area;
        text << "heat kernel (beta = " << fmt_double(rc.beta) << ", area = " << fmt_double(rc.area)
             << ") = " << fmt_double(hk) << "\n";
    }
    return finish(rc, std::move(j), text.str(), t0);
}

inline Json signature_json(const Signature& sig) {
    Json s = Json::object();
    s["negative"] = sig.neg;
    s["positive"] = sig.pos;
    s["zero"] = sig.zero;
    return s;
}

inline const char* rep_name(HeegaardDiagram::Rep rep) {
    switch (rep) {
        case HeegaardDiagram::Rep::ModularWord: return "modular-word";
        case HeegaardDiagram::Rep::TwistWord: return "twist-word";
        case HeegaardDiagram::Rep::Curves: return "curves";
        case HeegaardDiagram::Rep::Incidence: return "incidence";
    }
    return "unknown";
}

inline int cmd_heegaard(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    HeegaardFile hf = parse_heegaard(slurp(rc.input_path));
    check_level(hf.level);
    BlocksEngine eng(hf.level);
    const HeegaardResult res = heegaard_invariant_full(eng, hf.diagram);

    Json j = result_json(hf.level, res.value);
    j["genus"] = hf.diagram.genus;
    j["representation"] = rep_name(hf.diagram.rep);
    j["raw"] = cyc_json(res.raw);
    j["signature"] = signature_json(res.sig);
    if (!res.chain.empty()) {
        Json chain = Json::array();
        for (long c : res.chain) chain.push_back(c);
        j["chain"] = std::move(chain);
    }
    if (res.used_link) j["surgery_components"] = res.link.word.ncomponents;

    std::ostringstream text;
    text << "Heegaard invariant at level " << hf.level << " (genus " << hf.diagram.genus << ", "
         << rep_name(hf.diagram.rep) << ")\n"
         << value_text(res.value);
    return finish(rc, std::move(j), text.str(), t0);
}

inline int cmd_surgery(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    FramedSurgeryLink link = parse_surgery_link(slurp(rc.input_path));
    check_level(link.word.level);
    BlocksEngine eng(link.word.level);
    const SurgeryResult res = surgery_invariant_full(eng, link);

    Json j = result_json(link.word.level, res.value);
    j["components"] = link.word.ncomponents;
    j["raw"] = cyc_json(res.raw);
    j["signature"] = signature_json(res.sig);
    Json linking = Json::array();
    for (const auto& row : res.linking) {
        Json jr = Json::array();
        for (long x : row) jr.push_back(x);
        linking.push_back(std::move(jr));
    }
    j["linking_matrix"] = std::move(linking);
    Json writhe = Json::array();
    for (long x : res.writhe) writhe.push_back(x);
    j["writhe"] = std::move(writhe);

    std::ostringstream text;
    text << "surgery invariant at level " << link.word.level << " (" << link.word.ncomponents
         << " components, signature +" << res.sig.pos << "/-" << res.sig.neg << "/0*"
         << res.sig.zero << ")\n"
         << value_text(res.value);
    return finish(rc, std::move(j), text.str(), t0);
}

inline int cmd_triangulation(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    TriangulationFile tf = parse_triangulation(slurp(rc.input_path));
    check_level(tf.level);
    ThickeningReport report{};
    const HeegaardDiagram d = canonical_thickening(tf.complex, &report);
    BlocksEngine eng(tf.level);
    const CycNum value = heegaard_invariant(eng, d);

    Json j = result_json(tf.level, value);
    j["genus"] = report.genus;
    Json cx = Json::object();
    cx["edges"] = report.edges;
    cx["faces"] = report.faces;
    cx["tetrahedra"] = report.tets;
    cx["vertices"] = report.vertices;
    j["complex"] = std::move(cx);
    Json th = Json::object();
    th["edges"] = report.l_edges;
    th["euler"] = report.l_euler;
    th["faces"] = report.l_faces;
    th["vertices"] = report.l_vertices;
    j["thickened"] = std::move(th);

    std::ostringstream text;
    text << "triangulation invariant at level " << tf.level << "\n"
         << "complex: " << report.vertices << " vertices, " << report.edges << " edges, "
         << report.faces << " faces, " << report.tets << " tetrahedra\n"
         << "thickened surface: genus " << report.genus << " (Euler " << report.l_euler << ")\n"
         << value_text(value);
    return finish(rc, std::move(j), text.str(), t0);
}

inline int cmd_verify(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    check_level(rc.level);
    FusionData fd(rc.level);
    Json suites = Json::array();
    std::ostringstream text;
    for (const IdentitySuite& suite : identity_suites()) {
        try {
            const long n = suite.run(fd);
            text << suite.name << ": PASS (" << n << " checks)\n";
            Json s = Json::object();
            s["checks"] = n;
            s["name"] = suite.name;
            s["status"] = "PASS";
            suites.push_back(std::move(s));
        } catch (const IdentityError& e) {
            if (rc.format == "text") {
                text << suite.name << ": FAIL (" << e.what() << ")\n";
                std::cout << text.str();
            } else {
                Json s = Json::object();
                s["error"] = e.what();
                s["name"] = suite.name;
                s["status"] = "FAIL";
                suites.push_back(std::move(s));
                Json j = Json::object();
                j["qtqft-format"] = 1;
                j["level"] = rc.level;
                j["suites"] = std::move(suites);
                json_dump(std::cout, j, 0);
                std::cout << "\n";
            }
            return fail_structured("verify", e.what());
        }
    }
    Json j = Json::object();
    j["qtqft-format"] = 1;
    j["level"] = rc.level;
    j["suites"] = std::move(suites);
    return finish(rc, std::move(j), text.str(), t0);
}

inline int cmd_oracle_braid(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    check_level(rc.level);
    oracle::RepOracle orc(rc.level);
    const int sign = rc.inverse ? -1 : +1;
    const CycNum mu = orc.braid_eigen(rc.twice_spin, rc.channel, sign);
    const CycNum predicted = orc.fusion().lambda_sqrt(rc.twice_spin, rc.twice_spin, rc.channel, sign);
    const bool matches = mu == predicted;

    Json j = result_json(rc.level, mu);
    j["twice_spin"] = rc.twice_spin;
    j["channel"] = rc.channel;
    j["inverse"] = rc.inverse;
    j["matches_recoupling"] = matches;

    std::ostringstream text;
    text << "braiding eigenvalue on channel " << rc.channel << " of " << rc.twice_spin << " (x) "
         << rc.twice_spin << (rc.inverse ? " (inverse)" : "") << "\n"
         << value_text(mu) << "matches recoupling phase: " << (matches ? "yes" : "NO") << "\n";
    const int code = finish(rc, std::move(j), text.str(), t0);
    if (!matches) return fail_structured("oracle braid", "eigenvalue differs from the recoupling phase");
    return code;
}

inline int cmd_oracle_sample(const RunConfig& rc, std::chrono::steady_clock::time_point t0) {
    check_level(rc.level);
    oracle::RepOracle orc(rc.level);
    const FusionData& fd = orc.fusion();
    const int amax = std::min(3, rc.level);
    std::mt19937 rng(static_cast<std::mt19937::result_type>(rc.seed));
    long matches = 0;
    for (long t = 0; t < rc.count; ++t) {
        const int a = static_cast<int>(rng() % static_cast<unsigned>(amax + 1));
        const std::vector<int> channels = fd.fusion_range(a, a);
        const int c = channels[rng() % channels.size()];
        const int sign = (rng() % 2 == 0) ? +1 : -1;
        if (orc.braid_eigen(a, c, sign) == fd.lambda_sqrt(a, a, c, sign)) {
            ++matches;
        } else {
            std::ostringstream msg;
            msg << "sample " << t << ": braid eigenvalue mismatch at (a=" << a << ", c=" << c
                << ", sign=" << sign << ")";
            return fail_structured("oracle sample", msg.str().c_str());
        }
    }
    Json j = Json::object();
    j["qtqft-format"] = 1;
    j["level"] = rc.level;
    j["samples"] = rc.count;
    j["matches"] = matches;
    j["seed"] = static_cast<long long>(rc.seed);
    std::ostringstream text;
    text << "braiding samples: " << matches << "/" << rc.count << " match the recoupling phase\n";
    return finish(rc, std::move(j), text.str(), t0);
}

// ---------------------------------------------------------------------------
// Argument parsing and dispatch
// ---------------------------------------------------------------------------

inline int run(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"exact recoupling, link, and three-manifold invariants"};
    app.require_subcommand(1);
    RunConfig rc;

    auto add_format = [&rc](CLI::App* cmd) {
        cmd->add_option("--format", rc.format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_flag("--timing", rc.timing, "include the runtime in the output");
    };
    auto add_level = [&rc](CLI::App* cmd, bool required) {
        CLI::Option* opt = cmd->add_option("--level", rc.level, "fusion level k")
                               ->check(CLI::Range(1, 16));
        if (required) opt->required();
        return opt;
    };
    auto add_file = [&rc](CLI::App* cmd, const char* what) {
        cmd->add_option("file", rc.input_path, what)->required();
    };

    CLI::App* fusion = app.add_subcommand("fusion", "fusion-data tables");
    fusion->require_subcommand(1);
    CLI::App* dump = fusion->add_subcommand("dump", "emit every table at a level");
    add_level(dump, true);

    CLI::App* link = app.add_subcommand("link-invariant", "colored-link invariant of a Morse word");
    add_file(link, "Morse word file");
    add_level(link, false);
    link->add_option("--color", rc.colors, "coloring override (twice-spins, comma separated)")
        ->delimiter(',');

    CLI::App* sz = app.add_subcommand("surface-z", "closed-surface partition function");
    sz->add_option("--genus", rc.genus, "genus of the surface")->required()->check(CLI::Range(0, 64));
    add_level(sz, true);
    sz->add_option("--beta", rc.beta, "inverse temperature of the heat-kernel deformation")
        ->check(CLI::PositiveNumber);
    sz->add_option("--area", rc.area, "area of the heat-kernel deformation")
        ->check(CLI::PositiveNumber);

    CLI::App* heeg = app.add_subcommand("heegaard-invariant", "invariant of a Heegaard diagram");
    add_file(heeg, "Heegaard diagram file");

    CLI::App* surg = app.add_subcommand("surgery-invariant", "invariant of a framed surgery link");
    add_file(surg, "framed surgery link file");

    CLI::App* tri = app.add_subcommand("triangulation-invariant",
                                       "invariant of a closed oriented triangulation");
    add_file(tri, "triangulation file");

    CLI::App* verify = app.add_subcommand("verify", "run the identity suites at a level");
    add_level(verify, true);

    CLI::App* orc = app.add_subcommand("oracle", "representation-theoretic cross-checks");
    orc->require_subcommand(1);
    CLI::App* braid = orc->add_subcommand("braid", "braiding eigenvalue on a fusion channel");
    add_level(braid, true);
    braid->add_option("--twice-spin", rc.twice_spin, "strand label (twice-spin, at most 3)")
        ->required()
        ->check(CLI::Range(0, 3));
    braid->add_option("--channel", rc.channel, "fusion channel (twice-spin)")->required();
    braid->add_flag("--inverse", rc.inverse, "use the inverse braiding");
    CLI::App* sample = orc->add_subcommand("sample", "randomized braiding cross-check");
    add_level(sample, true);
    sample->add_option("--seed", rc.seed, "random seed");
    sample->add_option("--count", rc.count, "number of samples")->check(CLI::Range(1L, 100000L));

    // Format/timing flags are per-subcommand so that `--help` stays honest.
    for (CLI::App* cmd : {dump, link, sz, heeg, surg, tri, verify, braid, sample}) add_format(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        Json err = Json::object();
        err["error"] = std::string(e.what());
        err["help"] = "run 'qtqft --help' for usage";
        json_dump(std::cerr, err, 0);
        std::cerr << "\n";
        return e.get_exit_code();
    }

    // Verify reads as a report, so it defaults to text; data commands to json.
    if (verify->parsed() && verify->count("--format") == 0) rc.format = "text";

    // Resolve which leaf subcommand ran, for error reports.
    for (const auto& [cmd, name] :
         std::vector<std::pair<CLI::App*, const char*>>{{dump, "fusion dump"},
                                                        {link, "link-invariant"},
                                                        {sz, "surface-z"},
                                                        {heeg, "heegaard-invariant"},
                                                        {surg, "surgery-invariant"},
                                                        {tri, "triangulation-invariant"},
                                                        {verify, "verify"},
                                                        {braid, "oracle braid"},
                                                        {sample, "oracle sample"}})
        if (cmd->parsed()) rc.subcommand = name;

    try {
        if (dump->parsed()) return cmd_fusion_dump(rc, t0);
        if (link->parsed()) return cmd_link_invariant(rc, t0);
        if (sz->parsed()) return cmd_surface_z(rc, t0);
        if (heeg->parsed()) return cmd_heegaard(rc, t0);
        if (surg->parsed()) return cmd_surgery(rc, t0);
        if (tri->parsed()) return cmd_triangulation(rc, t0);
        if (verify->parsed()) return cmd_verify(rc, t0);
        if (braid->parsed()) return cmd_oracle_braid(rc, t0);
        if (sample->parsed()) return cmd_oracle_sample(rc, t0);
    } catch (const std::exception& e) {
        return fail_structured(rc.subcommand, e.what());
    }
    return fail_structured(rc.subcommand, "no subcommand dispatched");
}

}  // namespace cli
}  // namespace qtqft

int main(int argc, char** argv) { return qtqft::cli::run(argc, argv); }
