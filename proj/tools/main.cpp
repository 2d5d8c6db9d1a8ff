// conicbundle: batch front-end for the point counters, the constant
// assembly and the invariant checks.
//
//   conicbundle count --engine fast --bound 1000 --bound 10000
//   conicbundle predict --pmax 10000 --samples 10000000 --seed 7
//   conicbundle alpha --degree 4 --action conj-q-i
//   conicbundle selftest --quick
//
// JSON goes to stdout (or --output), floats printed with 17 significant
// digits and keys in a fixed order. Field names are frozen in
// schema/cli_schema.json.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "conicbundle/arith.hpp"
#include "conicbundle/constants.hpp"
#include "conicbundle/fibration.hpp"
#include "conicbundle/nefcone.hpp"
#include "conicbundle/surface.hpp"

#ifndef CONICBUNDLE_GOLDEN
#define CONICBUNDLE_GOLDEN "tests/golden/counts.csv"
#endif

using Json = nlohmann::ordered_json;
using namespace conicbundle;

namespace {

constexpr int kSchemaVersion = 1;

// ── Output ──────────────────────────────────────────────────────────────────

std::string fmt17(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump(const Json& j, std::string& out, int indent, int depth) {
    auto pad = [&](int d) { out += '\n' + std::string(static_cast<size_t>(indent * d), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                pad(depth + 1);
                out += Json(it.key()).dump() + ": ";
                dump(it.value(), out, indent, depth + 1);
            }
            pad(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                pad(depth + 1);
                dump(j[i], out, indent, depth + 1);
            }
            pad(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float:
            out += fmt17(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

std::string to_json_text(const Json& j) {
    std::string s;
    dump(j, s, 2, 0);
    return s + '\n';
}

std::string csv_field(const Json& v) {
    std::string s;
    if (v.is_string()) {
        s = v.get<std::string>();
    } else if (v.is_number_float()) {
        s = fmt17(v.get<double>());
    } else if (v.is_null()) {
        s = "";
    } else {
        s = v.dump();
    }
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

void flatten(const Json& j, const std::string& prefix, Json& flat) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), flat);
    } else if (!j.is_array()) {
        flat[prefix] = j;
    }
}

// Tables come from a "rows" array; anything else becomes one flattened row.
std::string to_csv_text(const Json& j) {
    std::vector<Json> rows;
    if (j.contains("rows") && j["rows"].is_array()) {
        for (const auto& r : j["rows"]) {
            Json flat = Json::object();
            flatten(r, "", flat);
            rows.push_back(flat);
        }
    } else {
        Json flat = Json::object();
        flatten(j, "", flat);
        rows.push_back(flat);
    }
    std::string out;
    if (rows.empty()) return out;
    std::vector<std::string> cols;
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it) cols.push_back(it.key());
    for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + csv_field(cols[i]);
    out += "\r\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + csv_field(r.contains(cols[i]) ? r[cols[i]] : Json());
        out += "\r\n";
    }
    return out;
}

struct Common {
    unsigned threads = 0;
    std::string output;
    std::string format = "json";
    bool no_timing = false;
};

unsigned resolve_threads(unsigned flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("CONICBUNDLE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
        throw CLI::ValidationError("CONICBUNDLE_THREADS", "must be a positive integer");
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void emit(const Common& c, const Json& j) {
    std::string text = c.format == "csv" ? to_csv_text(j) : to_json_text(j);
    if (c.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + c.output);
    f << text;
}

std::string i128_str(i128 v) { return conicbundle::to_string(v); }

Json rational_json(const Rational& r) {
    return Json{{"num", i128_str(r.num())}, {"den", i128_str(r.den())}, {"text", r.str()}, {"value", r.to_double()}};
}

Json estimate_json(const constants::Estimate& e) { return Json{{"value", e.value}, {"error_bar", e.error_bar}}; }

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// ── count / compare ─────────────────────────────────────────────────────────

Json count_row(const surface::CountReport& r, double secs, bool timing) {
    Json row{{"B", r.B}, {"n1", r.n1}, {"n_U", r.n_U}};
    row["seconds"] = timing ? Json(secs) : Json();
    row["stratum_zero"] = r.stratum_zero;
    row["stratum_x4"] = r.stratum_x4;
    row["engine"] = r.engine;
    return row;
}

surface::CountReport run_count(const std::string& engine, int64_t B, unsigned threads) {
    if (engine == "naive") return surface::count_naive(B);
    return fibration::count_fast(B, threads);
}

int cmd_count(const Common& c, const std::string& engine, const std::vector<int64_t>& bounds) {
    unsigned th = resolve_threads(c.threads);
    Json rows = Json::array();
    for (int64_t B : bounds) {
        Stopwatch sw;
        auto r = run_count(engine, B, th);
        rows.push_back(count_row(r, sw.seconds(), !c.no_timing));
    }
    if (c.format == "csv") {
        // B,n1,n_U,seconds
        Json slim = Json::array();
        for (const auto& r : rows) slim.push_back(Json{{"B", r["B"]}, {"n1", r["n1"]}, {"n_U", r["n_U"]}, {"seconds", r["seconds"]}});
        emit(c, Json{{"rows", slim}});
        return 0;
    }
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "count"},
                 {"config", {{"engine", engine}, {"threads", th}}},
                 {"rows", rows}});
    return 0;
}

constants::PeyreConfig peyre_config(uint64_t pmax, int nucap, uint64_t samples, uint64_t seed, unsigned threads) {
    constants::PeyreConfig pc;
    pc.cstar.pmax = pmax;
    pc.cstar.nucap = nucap;
    pc.quad.samples = samples;
    pc.quad.seed = seed;
    pc.quad.threads = threads;
    return pc;
}

Json peyre_json(const constants::PeyreBreakdown& b) {
    return Json{{"alpha", rational_json(b.alpha)},
                {"beta", b.beta},
                {"c_star", estimate_json(b.c_star)},
                {"sigma_inf", estimate_json(b.sigma_inf)},
                {"omega_inf", estimate_json(b.omega_inf)},
                {"tau_H", estimate_json(b.tau_H)},
                {"c_XH", estimate_json(b.c_XH)},
                {"c_XH_route_a", estimate_json(b.c_XH_route_a)},
                {"route_gap", b.route_gap},
                {"routes_agree", b.routes_agree}};
}

int cmd_compare(const Common& c, const std::string& engine, const std::vector<int64_t>& bounds, uint64_t pmax,
                int nucap, uint64_t samples, uint64_t seed, double theta1, double theta2) {
    unsigned th = resolve_threads(c.threads);
    auto pb = constants::peyre_assemble(peyre_config(pmax, nucap, samples, seed, th));
    const double cxh = pb.c_XH.value;
    Json rows = Json::array();
    for (int64_t B : bounds) {
        Stopwatch sw;
        auto r = run_count(engine, B, th);
        double secs = sw.seconds();
        double lb = std::log(static_cast<double>(B));
        double ratio = static_cast<double>(r.n_U) / (static_cast<double>(B) * std::pow(lb, 4));
        Json row{{"B", B}, {"n_U", r.n_U}, {"ratio", ratio}, {"predicted_c", cxh}, {"ratio_over_c", ratio / cxh}};
        row["seconds"] = c.no_timing ? Json() : Json(secs);
        if (B >= 16 && B <= 10'000'000) {
            constants::MainTermConfig mc;
            mc.B = B;
            mc.theta1 = theta1;
            mc.theta2 = theta2;
            mc.c_star = pb.c_star.value;
            mc.threads = th;
            auto m = constants::main_term_predict(mc);
            row["main_term"] = Json{{"sigma_direct", m.sigma_direct},
                                    {"sigma_closed", m.sigma_closed},
                                    {"farine_lower", m.farine_lower},
                                    {"farine_upper", m.farine_upper}};
        }
        rows.push_back(row);
    }
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "compare"},
                 {"config",
                  {{"engine", engine},
                   {"pmax", pmax},
                   {"nucap", nucap},
                   {"samples", samples},
                   {"seed", seed},
                   {"threads", th}}},
                 {"c_XH", estimate_json(pb.c_XH)},
                 {"rows", rows}});
    return 0;
}

// ── constants ───────────────────────────────────────────────────────────────

int cmd_predict(const Common& c, uint64_t pmax, int nucap, uint64_t samples, uint64_t seed, const std::string& method) {
    unsigned th = resolve_threads(c.threads);
    auto pc = peyre_config(pmax, nucap, samples, seed, th);
    pc.quad.method = method == "grid" ? constants::QuadMethod::adaptive_grid : constants::QuadMethod::monte_carlo;
    auto pb = constants::peyre_assemble(pc);
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "predict"},
                 {"value", pb.c_XH.value},
                 {"error_bar", pb.c_XH.error_bar},
                 {"config",
                  {{"pmax", pmax},
                   {"nucap", nucap},
                   {"samples", samples},
                   {"seed", seed},
                   {"method", method},
                   {"threads", th}}},
                 {"breakdown", peyre_json(pb)}});
    return 0;
}

int cmd_local(const Common& c, uint64_t p, int n, int cap, const std::string& mode) {
    static const std::map<std::string, constants::DirectMode> modes = {{"auto", constants::DirectMode::automatic},
                                                                       {"raw", constants::DirectMode::raw},
                                                                       {"hensel", constants::DirectMode::hensel},
                                                                       {"fibered", constants::DirectMode::fibered}};
    Rational direct = constants::omega_p_direct(p, n, modes.at(mode));
    Rational series = constants::omega_p_series(p, cap);
    Rational gap = direct - series;
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "local"},
                 {"value", direct.to_double()},
                 {"error_bar", std::fabs(gap.to_double())},
                 {"config", {{"p", p}, {"n", n}, {"cap", cap}, {"mode", mode}}},
                 {"direct", rational_json(direct)},
                 {"series", rational_json(series)},
                 {"omega_full", constants::omega_p_full(direct, p).to_double()}});
    return 0;
}

int cmd_dstar(const Common& c, uint64_t p, int n, int mu, int nu, int64_t cc, int64_t d) {
    Rational ds = constants::d_star_direct(p, n, mu, nu, cc, d);
    Rational df = constants::d_full(p, n, mu, nu, cc, d);
    Json j{{"schema_version", kSchemaVersion},
           {"command", "dstar"},
           {"value", ds.to_double()},
           {"error_bar", 0.0},
           {"config", {{"p", p}, {"n", n}, {"mu", mu}, {"nu", nu}, {"c", cc}, {"d", d}}},
           {"d_star", rational_json(ds)},
           {"d_full", rational_json(df)}};
    if (p > 2 && mu == 0 && nu == 0) j["closed_form_00"] = rational_json(constants::d_star_00_closed(p));
    if (p > 2 && mu >= 1 && nu == 0) j["main_term_mu0"] = rational_json(constants::d_star_mu0_main(p, mu));
    emit(c, j);
    return 0;
}

int cmd_main_term(const Common& c, int64_t B, double t1, double t2, double K, int grid) {
    unsigned th = resolve_threads(c.threads);
    constants::MainTermConfig mc;
    mc.B = B;
    mc.theta1 = t1;
    mc.theta2 = t2;
    mc.K = K;
    mc.threads = th;
    mc.f_grid = grid;
    auto m = constants::main_term_predict(mc);
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "main-term"},
                 {"value", m.sigma_direct},
                 {"error_bar", std::fabs(m.sigma_direct - m.sigma_closed)},
                 {"config", {{"bound", B}, {"theta1", t1}, {"theta2", t2}, {"K", K}, {"f_grid", grid}, {"threads", th}}},
                 {"sigma_direct", m.sigma_direct},
                 {"sigma_closed", m.sigma_closed},
                 {"sigma_gap", m.sigma_gap},
                 {"farine_lower", m.farine_lower},
                 {"farine_upper", m.farine_upper},
                 {"z2", m.z2},
                 {"c_star", m.c_star},
                 {"vol_w0", rational_json(m.vol_w0)},
                 {"k_sensitivity", m.k_sensitivity}});
    return 0;
}

// ── alpha ───────────────────────────────────────────────────────────────────

nefcone::GroupAction make_action(int degree, const std::string& spec) {
    if (spec == "trivial") return nefcone::trivial_action(degree);
    if (spec == "full") return nefcone::full_weyl_action(degree);
    if (spec == "conj-q-i") {
        if (degree != 4) throw CLI::ValidationError("--action", "conj-q-i is a degree-4 action");
        return nefcone::conj_qi_action();
    }
    if (spec.rfind("file:", 0) == 0) {
        std::ifstream f(spec.substr(5));
        if (!f) throw CLI::ValidationError("--action", "cannot read " + spec.substr(5));
        std::stringstream ss;
        ss << f.rdbuf();
        auto a = nefcone::parse_cycles(degree, ss.str());
        nefcone::validate_action(a);
        return a;
    }
    throw CLI::ValidationError("--action", "expected trivial, full, conj-q-i or file:<path>");
}

int cmd_alpha(const Common& c, int degree, const std::string& action) {
    auto r = nefcone::alpha(make_action(degree, action), degree);
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "alpha"},
                 {"config", {{"degree", degree}, {"action", action}}},
                 {"alpha_num", i128_str(r.alpha.num())},
                 {"alpha_den", i128_str(r.alpha.den())},
                 {"rank", r.rank},
                 {"n_rational_lines", r.n_rational_lines},
                 {"orbit_signature", r.orbit_signature},
                 {"convention", r.convention},
                 {"m", r.m},
                 {"alpha_rank_times_volume", r.alpha_ii.str()},
                 {"n_vertices", r.n_vertices}});
    return 0;
}

// ── selftest ────────────────────────────────────────────────────────────────

struct Check {
    std::string name;
    std::function<std::string()> run;  // empty string on success, else the reason
};

struct GoldenRow {
    int64_t B, n_U, n1, stratum_zero, stratum_x4;
};

std::vector<GoldenRow> read_golden(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open golden file " + path);
    std::string line;
    std::getline(f, line);
    if (line.rfind("B,n_U,n1,stratum_zero,stratum_x4", 0) != 0) throw std::runtime_error("bad golden header in " + path);
    std::vector<GoldenRow> rows;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        GoldenRow r{};
        if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%ld,%ld", &r.B, &r.n_U, &r.n1, &r.stratum_zero, &r.stratum_x4) != 5)
            throw std::runtime_error("bad golden row: " + line);
        rows.push_back(r);
    }
    return rows;
}

std::vector<Check> selftest_checks(bool quick, const std::string& golden, unsigned threads) {
    std::vector<Check> checks;
    checks.push_back({"h*tau equals g on prime powers", [] {
                          for (u128 p = 2; p <= 97; ++p) {
                              if (!arith::is_prime(p)) continue;
                              for (int v = 0; v <= 10; ++v) {
                                  i128 n = arith::ipow(static_cast<i128>(p), v);
                                  auto lhs = arith::dirichlet_convolve({arith::Mult::h, 2}, {arith::Mult::tau, 2}, n);
                                  if (lhs != arith::g_value(p, v)) return "mismatch at " + i128_str(n);
                              }
                          }
                          return std::string();
                      }});
    checks.push_back({"lambda lemma", [quick] {
                          std::mt19937_64 rng(12345);
                          std::uniform_int_distribution<int64_t> ab(1, 200), st(-100000, 100000), tt(1, 100000);
                          int need = quick ? 10000 : 100000;
                          for (int done = 0; done < need;) {
                              fibration::Fiber f{ab(rng), ab(rng)};
                              if (std::gcd(f.a, f.b) != 1 || f.a * f.b == 1) continue;
                              i128 s = st(rng), t = tt(rng);
                              if (!fibration::admissible(f, s, t)) continue;
                              if (fibration::lambda_profile(f, s, t).lambda() != fibration::lambda_direct(f, s, t))
                                  return "mismatch at a=" + std::to_string(f.a) + " b=" + std::to_string(f.b);
                              ++done;
                          }
                          return std::string();
                      }});
    checks.push_back({"fiber parametrization", [quick] {
                          int64_t mmax = quick ? 10 : 30, H = quick ? 100 : 200;
                          for (int64_t a = 1; a <= mmax; ++a) {
                              for (int64_t b = 1; b <= mmax; ++b) {
                                  if (std::gcd(a, b) != 1 || a * b == 1) continue;
                                  fibration::Fiber f{a, b};
                                  if (fibration::fiber_points_param(f, H) != fibration::fiber_points_naive(f, H))
                                      return "mismatch at fiber (" + std::to_string(a) + "," + std::to_string(b) + ")";
                              }
                          }
                          return std::string();
                      }});
    checks.push_back({"golden counts", [quick, golden, threads] {
                          auto rows = read_golden(golden);
                          if (rows.empty()) return std::string("golden file has no rows");
                          for (const auto& g : rows) {
                              if (g.B > (quick ? 200 : 500)) continue;
                              for (const auto& r : {surface::count_naive(g.B), fibration::count_fast(g.B, threads)}) {
                                  if (r.n_U != g.n_U || r.n1 != g.n1 || r.stratum_zero != g.stratum_zero ||
                                      r.stratum_x4 != g.stratum_x4)
                                      return r.engine + " disagrees with golden row B=" + std::to_string(g.B);
                              }
                          }
                          return std::string();
                      }});
    checks.push_back({"D* closed forms", [] {
                          for (u128 p : {3, 5, 7}) {
                              for (int n = 2; n <= 8; ++n) {
                                  if (arith::ipow(static_cast<i128>(p), n) > 10'000'000) break;
                                  if (constants::d_star_direct(p, n, 0, 0, 1, 1) != constants::d_star_00_closed(p))
                                      return "D*00 at p=" + i128_str(p) + " n=" + std::to_string(n);
                              }
                          }
                          for (int mu = 3; mu <= 8; ++mu) {
                              int64_t d = 1 - (int64_t{1} << (mu - 1));
                              if (constants::n_mu_check(mu, 1, d) != constants::n_mu_closed(mu))
                                  return "N_mu at mu=" + std::to_string(mu);
                          }
                          return std::string();
                      }});
    checks.push_back({"vol(W0) = 1/72", [] {
                          return nefcone::vol_W0() == Rational(1, 72) ? std::string() : "got " + nefcone::vol_W0().str();
                      }});
    checks.push_back({"alpha table rows", [] {
                          struct Row {
                              nefcone::GroupAction act;
                              int degree;
                              Rational want;
                          };
                          std::vector<Row> rows = {{nefcone::trivial_action(4), 4, Rational(1, 180)},
                                                   {nefcone::conj_qi_action(), 4, Rational(1, 36)},
                                                   {nefcone::full_weyl_action(4), 4, Rational(1)},
                                                   {nefcone::trivial_action(3), 3, Rational(1, 120)}};
                          for (const auto& r : rows) {
                              Rational got = nefcone::alpha(r.act, r.degree).alpha;
                              if (got != r.want) return "got " + got.str() + ", want " + r.want.str();
                          }
                          return std::string();
                      }});
    checks.push_back({"main-term h(2,1) = 5/2", [] {
                          Rational h = constants::main_term_h({2, 1}, Rational(1000000000));
                          return h == Rational(5, 2) ? std::string() : "got " + h.str();
                      }});
    return checks;
}

int cmd_selftest(const Common& c, bool quick, const std::string& golden) {
    unsigned th = resolve_threads(c.threads);
    Json rows = Json::array();
    bool all = true;
    for (const auto& chk : selftest_checks(quick, golden, th)) {
        Stopwatch sw;
        std::string why;
        try {
            why = chk.run();
        } catch (const std::exception& e) {
            why = std::string("exception: ") + e.what();
        }
        bool ok = why.empty();
        all = all && ok;
        Json row{{"check", chk.name}, {"status", ok ? "pass" : "fail"}, {"detail", why}};
        row["seconds"] = c.no_timing ? Json() : Json(sw.seconds());
        rows.push_back(row);
        std::cerr << (ok ? "PASS " : "FAIL ") << chk.name << (ok ? "" : ": " + why) << '\n';
    }
    emit(c, Json{{"schema_version", kSchemaVersion},
                 {"command", "selftest"},
                 {"config", {{"quick", quick}, {"golden", golden}, {"threads", th}}},
                 {"passed", all},
                 {"rows", rows}});
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rational points of bounded height on x0x1 = x2x3, x0^2 + x1^2 + x2^2 - x3^2 - 2x4^2 = 0"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--threads", common.threads, "worker threads (default: $CONICBUNDLE_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("-o,--output", common.output, "write to this file instead of stdout");
    app.add_option("--format", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--no-timing", common.no_timing, "leave timing fields empty so output is byte-reproducible");

    std::function<int()> action;

    auto* count = app.add_subcommand("count", "exact N_{U,H}(B)");
    std::string engine = "fast";
    std::vector<int64_t> bounds;
    count->add_option("--engine", engine)->check(CLI::IsMember({"naive", "fast"}));
    count->add_option("--bound", bounds, "height bound (repeatable)")->required()->check(CLI::PositiveNumber);
    count->callback([&] {
        for (int64_t B : bounds) {
            if (engine == "naive" && B > 2000) throw CLI::ValidationError("--bound", "naive engine needs B <= 2000");
            if (engine == "fast" && B > 100'000'000) throw CLI::ValidationError("--bound", "fast engine needs B <= 1e8");
        }
        action = [&] { return cmd_count(common, engine, bounds); };
    });

    uint64_t pmax = 10000, samples = 10'000'000, seed = 20240601;
    int nucap = 24;
    double theta1 = 0.1, theta2 = 0.1;

    auto* compare = app.add_subcommand("compare", "N_{U,H}(B) / (B (log B)^4) against the predicted constant");
    std::vector<int64_t> ladder = {1000, 10000, 100000};
    std::string cmp_engine = "fast";
    compare->add_option("--bound", ladder, "height bounds (repeatable)")->check(CLI::Range(int64_t{2}, int64_t{100'000'000}));
    compare->add_option("--engine", cmp_engine)->check(CLI::IsMember({"naive", "fast"}));
    compare->add_option("--pmax", pmax);
    compare->add_option("--nucap", nucap)->check(CLI::Range(0, 60));
    compare->add_option("--samples", samples)->check(CLI::PositiveNumber);
    compare->add_option("--seed", seed);
    compare->add_option("--theta1", theta1);
    compare->add_option("--theta2", theta2);
    compare->callback([&] {
        action = [&] { return cmd_compare(common, cmp_engine, ladder, pmax, nucap, samples, seed, theta1, theta2); };
    });

    auto* predict = app.add_subcommand("predict", "assemble c_{X,H} both ways");
    std::string method = "mc";
    predict->add_option("--pmax", pmax)->check(CLI::Range(uint64_t{2}, uint64_t{10'000'000}));
    predict->add_option("--nucap", nucap)->check(CLI::Range(0, 60));
    predict->add_option("--samples", samples)->check(CLI::PositiveNumber);
    predict->add_option("--seed", seed);
    predict->add_option("--method", method, "sigma_inf quadrature: mc or grid")->check(CLI::IsMember({"mc", "grid"}));
    predict->callback([&] { action = [&] { return cmd_predict(common, pmax, nucap, samples, seed, method); }; });

    auto* local = app.add_subcommand("local", "omega*_{H,p} by counting and by the series");
    uint64_t p = 3;
    int n = 8, cap = 6;
    std::string mode = "auto";
    local->add_option("--p", p)->required();
    local->add_option("--n", n)->check(CLI::Range(1, 60));
    local->add_option("--cap", cap)->check(CLI::Range(0, 60));
    local->add_option("--mode", mode)->check(CLI::IsMember({"auto", "raw", "hensel", "fibered"}));
    local->callback([&] { action = [&] { return cmd_local(common, p, n, cap, mode); }; });

    auto* dstar = app.add_subcommand("dstar", "D*_{mu,nu}(p^n) by counting");
    int mu = 0, nu = 0;
    int64_t cc = 1, d = 1;
    dstar->add_option("--p", p)->required();
    dstar->add_option("--n", n)->required()->check(CLI::Range(0, 60));
    dstar->add_option("--mu", mu)->check(CLI::NonNegativeNumber);
    dstar->add_option("--nu", nu)->check(CLI::NonNegativeNumber);
    dstar->add_option("--c", cc);
    dstar->add_option("--d", d);
    dstar->callback([&] { action = [&] { return cmd_dstar(common, p, n, mu, nu, cc, d); }; });

    auto* alpha = app.add_subcommand("alpha", "nef cone volume alpha(X) for a Galois action on the lines");
    int degree = 4;
    std::string act = "conj-q-i";
    alpha->add_option("--degree", degree)->check(CLI::IsMember({3, 4}));
    alpha->add_option("--action", act, "trivial, full, conj-q-i or file:<path>");
    alpha->callback([&] { action = [&] { return cmd_alpha(common, degree, act); }; });

    auto* main_term = app.add_subcommand("main-term", "the finite main-term sums at height B");
    int64_t mt_bound = 100000;
    double K = 1.0;
    int grid = 400;
    main_term->add_option("--bound", mt_bound)->check(CLI::Range(int64_t{16}, int64_t{10'000'000}));
    main_term->add_option("--theta1", theta1);
    main_term->add_option("--theta2", theta2);
    main_term->add_option("--K", K)->check(CLI::Range(1.0, 1e300));
    main_term->add_option("--f-grid", grid)->check(CLI::Range(8, 1'000'000));
    main_term->callback([&] { action = [&] { return cmd_main_term(common, mt_bound, theta1, theta2, K, grid); }; });

    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    bool quick = false;
    std::string golden = CONICBUNDLE_GOLDEN;
    selftest->add_flag("--quick", quick, "smaller samples and bounds");
    selftest->add_option("--golden", golden, "golden count CSV");
    selftest->callback([&] { action = [&] { return cmd_selftest(common, quick, golden); }; });

    try {
        app.parse(argc, argv);
        return action();
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
