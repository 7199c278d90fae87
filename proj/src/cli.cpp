#include "exactrc/cli.hpp"

#include "exactrc/asymptotics.hpp"
#include "exactrc/channel.hpp"
#include "exactrc/classify.hpp"
#include "exactrc/exponent.hpp"
#include "exactrc/oracle.hpp"
#include "exactrc/tilt.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

namespace exactrc::cli {

namespace {

using Cell = std::variant<double, long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, long>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else
                return v;
        },
        c);
}

nlohmann::json json_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
            else
                return nlohmann::json(v);
        },
        c);
}

void write_table(const Table& t, bool json, std::ostream& out)
{
    if (json) {
        auto arr = nlohmann::json::array();
        for (const auto& row : t.rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t i = 0; i < t.columns.size(); ++i)
                obj[t.columns[i]] = json_cell(row[i]);
            arr.push_back(obj);
        }
        out << arr.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

struct Config {
    std::string channel;
    std::string rate;
    std::string n_list;
    std::string tie = "uniform";
    long samples = 100000;
    std::uint64_t seed = 1;
    std::optional<double> grid;
    std::string format = "csv";
    std::string force_regime;
    bool verbose = false;
    double crit_tol = 1e-9;
    double max_types = 5e7;
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double parse_number(const std::string& s)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v))
        throw UsageError("not a number: '" + s + "'");
    return v;
}

// Absolute nats, "I*f", "crit*f" or "mid" (halfway between R_crit and I).
double resolve_rate(const std::string& spec, double mi, double rcrit)
{
    if (spec == "mid")
        return 0.5 * (rcrit + mi);
    const auto star = spec.find('*');
    if (star == std::string::npos)
        return parse_number(spec);
    const std::string base = spec.substr(0, star);
    const double f = parse_number(spec.substr(star + 1));
    if (base == "I")
        return f * mi;
    if (base == "crit")
        return f * rcrit;
    throw UsageError("rate base must be 'I' or 'crit': '" + spec + "'");
}

std::vector<long> parse_n_list(const std::string& s)
{
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double v = parse_number(item);
        if (v < 1.0 || v != std::floor(v) || v > 1e9)
            throw UsageError("block lengths must be positive integers: '" + item + "'");
        const long n = static_cast<long>(v);
        if (!out.empty() && n <= out.back())
            throw UsageError("block lengths must be strictly increasing");
        out.push_back(n);
    }
    if (out.empty())
        throw UsageError("empty block length list");
    return out;
}

TieRule parse_tie(const std::string& s) { return s == "error" ? TieRule::TieAsError : TieRule::UniformRandom; }

struct Analysis {
    RateAnalysis ra;
    TiltedStats ts;
    ChannelClass cc;
    PairClass pc;
};

Analysis analyze_at(const DiscreteChannel& ch, const ChannelClass& cc, double rate, const Config& cfg)
{
    Analysis a;
    a.cc = cc;
    a.ra = solve_exponent(ch, rate, SolveOptions{cfg.crit_tol});
    if (cfg.force_regime == "below")
        a.ra = force_regime(ch, a.ra, Regime::BelowCritical);
    else if (cfg.force_regime == "crit")
        a.ra = force_regime(ch, a.ra, Regime::AtCritical);
    else if (cfg.force_regime == "above")
        a.ra = force_regime(ch, a.ra, Regime::AboveCritical);
    const auto zs = z_support(ch, a.ra.eta);
    a.ts = tilted_stats(zs, a.ra.rho, a.ra.rate);
    a.pc = classify_pair(zs, a.ts);
    return a;
}

struct Context {
    DiscreteChannel ch;
    ChannelClass cc;
    double mi;
    double rcrit;
    double rate;
};

Context load(const Config& cfg)
{
    auto ch = load_channel_file(cfg.channel);
    const auto cc = classify_channel(ch);
    const double mi = mutual_information(ch);
    const double rcrit = critical_rate(ch);
    const double rate = resolve_rate(cfg.rate, mi, rcrit);
    return Context{std::move(ch), cc, mi, rcrit, rate};
}

bool uniform_input(const DiscreteChannel& ch)
{
    const auto& p = ch.input().probs();
    return std::all_of(p.begin(), p.end(), [&](double v) { return std::abs(v - p[0]) <= 1e-12; });
}

void cmd_analyze(const Config& cfg, std::ostream& out)
{
    const auto ctx = load(cfg);
    const auto a = analyze_at(ctx.ch, ctx.cc, ctx.rate, cfg);

    std::string preview = "none";
    try {
        preview = std::string(to_string(predict(a.ra, a.ts, a.cc, a.pc, 1, TieRule::UniformRandom).branch));
    } catch (const PredictError&) {
    }

    std::string sym_check = "not applicable";
    if (ctx.cc.strongly_symmetric && uniform_input(ctx.ch)) {
        const bool lattice_ok = ctx.cc.nu_span == 0.0
            || (a.pc.z_lattice && std::abs(a.pc.z_lattice->h_prime - a.ra.eta * ctx.cc.nu_span) <= 1e-9);
        sym_check = (a.pc.pseudo_symmetric && lattice_ok) ? "consistent" : "violated";
    }

    std::vector<std::pair<std::string, Cell>> kv = {
        {"I", a.ra.mi},
        {"R", a.ra.rate},
        {"R_crit", a.ra.rcrit},
        {"E_r", a.ra.er},
        {"rho", a.ra.rho},
        {"eta", a.ra.eta},
        {"delta", a.ra.delta},
        {"regime", std::string(to_string(a.ra.regime))},
        {"mu0", a.ts.mu0},
        {"mu1", a.ts.mu1},
        {"mu2", a.ts.mu2},
        {"sigma00", a.ts.sigma00},
        {"sigma01", a.ts.sigma01},
        {"sigma11", a.ts.sigma11},
        {"det_sigma", a.ts.det_sigma},
        {"singular", ctx.cc.singular},
        {"nu_span", ctx.cc.nu_span},
        {"nu_gcd_candidate", ctx.cc.nu_fit.candidate},
        {"nu_max_residue", ctx.cc.nu_fit.max_residue},
        {"strongly_symmetric", ctx.cc.strongly_symmetric},
        {"pseudo_symmetric", a.pc.pseudo_symmetric},
        {"affine_residual", a.pc.affine_residual},
        {"z_lattice", a.pc.z_lattice.has_value()},
        {"h_prime", a.pc.z_lattice ? a.pc.z_lattice->h_prime : 0.0},
        {"a_prime", a.pc.z_lattice ? a.pc.z_lattice->a_prime : 0.0},
        {"z_max_residue", a.pc.z_fit.max_residue},
        {"branch_preview", preview},
        {"symmetry_lattice_check", sym_check},
    };
    if (cfg.format == "json") {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [k, v] : kv)
            obj[k] = json_cell(v);
        out << obj.dump(2) << '\n';
        return;
    }
    out << "key,value\n";
    for (const auto& [k, v] : kv)
        out << k << ',' << csv_cell(v) << '\n';
}

void cmd_predict(const Config& cfg, std::ostream& out)
{
    const auto ctx = load(cfg);
    const auto a = analyze_at(ctx.ch, ctx.cc, ctx.rate, cfg);
    const TieRule tie = parse_tie(cfg.tie);
    Table t;
    t.columns = {"n", "branch", "E_r", "prefactor", "I_n", "log10_P", "oscillating"};
    if (cfg.verbose)
        t.columns.push_back("alt_prefactor");
    for (long n : parse_n_list(cfg.n_list)) {
        const auto p = predict(a.ra, a.ts, a.cc, a.pc, n, tie);
        std::vector<Cell> row = {n, std::string(to_string(p.branch)), a.ra.er, p.prefactor, p.i_n,
                                 p.log_value / std::log(10.0), p.oscillating};
        if (cfg.verbose)
            row.push_back(p.alt_prefactor.value_or(std::nan("")));
        t.rows.push_back(std::move(row));
    }
    write_table(t, cfg.format == "json", out);
}

OracleEstimate run_oracle(const Context& ctx, const Config& cfg, long n, const CodebookSize& cs, TieRule tie)
{
    ExactOptions eo;
    eo.grid = cfg.grid;
    eo.max_types = cfg.max_types;
    try {
        return exact_prc(ctx.ch, n, cs.m, tie, eo);
    } catch (const OracleError&) {
        // Caps exceeded: fall back to importance sampling.
    }
    const auto a = analyze_at(ctx.ch, ctx.cc, cs.rate, cfg);
    McOptions mo;
    mo.samples = cfg.samples;
    mo.seed = cfg.seed;
    mo.grid = cfg.grid;
    return mc_prc(ctx.ch, a.ra, n, cs.m, tie, mo);
}

void cmd_oracle(const Config& cfg, std::ostream& out)
{
    const auto ctx = load(cfg);
    const TieRule tie = parse_tie(cfg.tie);
    Table t;
    t.columns = {"n", "M_n", "R_n", "method", "value", "stderr"};
    for (long n : parse_n_list(cfg.n_list)) {
        const auto cs = codebook_size(ctx.rate, n);
        const auto e = run_oracle(ctx, cfg, n, cs, tie);
        t.rows.push_back({n, cs.m, cs.rate, std::string(to_string(e.method)), e.value, e.std_error});
    }
    write_table(t, cfg.format == "json", out);
}

void cmd_compare(const Config& cfg, std::ostream& out)
{
    const auto ctx = load(cfg);
    const TieRule tie = parse_tie(cfg.tie);
    Table t;
    t.columns = {"n", "method", "P_oracle", "P_pred", "ratio", "stderr_ratio"};
    if (cfg.verbose)
        t.columns.insert(t.columns.end(), {"branch", "alt_ratio"});
    for (long n : parse_n_list(cfg.n_list)) {
        const auto cs = codebook_size(ctx.rate, n);
        const auto a = analyze_at(ctx.ch, ctx.cc, cs.rate, cfg);
        const auto p = predict(a.ra, a.ts, a.cc, a.pc, n, tie);
        const auto e = run_oracle(ctx, cfg, n, cs, tie);
        const double ratio = std::exp(e.log_value - p.log_value);
        const double se_ratio = e.value > 0.0 ? ratio * e.std_error / e.value : 0.0;
        std::vector<Cell> row = {n, std::string(to_string(e.method)), e.value, std::exp(p.log_value), ratio, se_ratio};
        if (cfg.verbose) {
            row.push_back(std::string(to_string(p.branch)));
            row.push_back(p.alt_prefactor ? ratio * p.prefactor / *p.alt_prefactor : std::nan(""));
        }
        t.rows.push_back(std::move(row));
    }
    write_table(t, cfg.format == "json", out);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact asymptotics of the random-coding error probability"};
    app.name("exactrc");
    app.require_subcommand(1);
    Config cfg;

    const auto add_common = [&cfg](CLI::App* s, bool needs_n) {
        s->add_option("--channel", cfg.channel, "Channel JSON file")->required()->check(CLI::ExistingFile);
        s->add_option("--rate", cfg.rate, "Rate: nats, I*f, crit*f or mid")->required();
        auto* n = s->add_option("--n", cfg.n_list, "Comma-separated, strictly increasing block lengths");
        if (needs_n)
            n->required();
        s->add_option("--tie", cfg.tie, "Tie rule")->check(CLI::IsMember({"uniform", "error"}));
        s->add_option("--samples", cfg.samples, "Importance samples")->check(CLI::Range(100L, 1000000000L));
        s->add_option("--seed", cfg.seed, "Monte Carlo seed");
        s->add_option("--grid", cfg.grid, "Rounding grid for nonlattice channels (nats)")
            ->check(CLI::PositiveNumber);
        s->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--force-regime", cfg.force_regime, "Override the regime")
            ->check(CLI::IsMember({"below", "crit", "above"}));
        s->add_option("--crit-tol", cfg.crit_tol, "Tolerance for R = R_crit")->check(CLI::NonNegativeNumber);
        s->add_option("--max-types", cfg.max_types, "Cap on enumerated types before Monte Carlo")
            ->check(CLI::PositiveNumber);
        s->add_flag("--verbose", cfg.verbose, "Extra columns");
    };
    auto* analyze = app.add_subcommand("analyze", "Exponent, tilted moments and classification");
    auto* predict_cmd = app.add_subcommand("predict", "Asymptotic prediction per n");
    auto* oracle = app.add_subcommand("oracle", "Exact or sampled P_RC(n)");
    auto* compare = app.add_subcommand("compare", "Oracle against prediction at the effective rate");
    add_common(analyze, false);
    add_common(predict_cmd, true);
    add_common(oracle, true);
    add_common(compare, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (analyze->parsed())
            cmd_analyze(cfg, out);
        else if (predict_cmd->parsed())
            cmd_predict(cfg, out);
        else if (oracle->parsed())
            cmd_oracle(cfg, out);
        else
            cmd_compare(cfg, out);
    } catch (const UsageError& e) {
        err << "exactrc: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "exactrc: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace exactrc::cli
