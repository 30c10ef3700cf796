// qcharm: command-line front end for the harmonic-map diagnostics.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qcharm/qcharm.hpp"

namespace {

using qcharm::io::json;

struct Cli {
    qcharm::RunConfig cfg;
    std::string config_path;
    bool config_priority = false;
    bool json_out = false;
    bool csv_out = false;
    std::string out;
    std::string check = "ap";
    std::string dump_weight;
    double r = 0.5, phi = 0.0;
    bool identity_check = false;
};

void emit(const Cli& cli, const std::string& text)
{
    if (cli.out.empty()) std::cout << text;
    else qcharm::io::write_text_file(cli.out, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_eval(const Cli& cli)
{
    auto src = qcharm::load_map(cli.cfg.map, cli.cfg.N, cli.cfg.curve);
    qcharm::DiskPoint p{cli.r, cli.phi};
    auto [fz, fzb] = src.map.wirtinger(p);
    json j{{"r", cli.r},
           {"phi", cli.phi},
           {"f", qcharm::io::to_json(src.map.evaluate(p))},
           {"f_z", qcharm::io::to_json(fz)},
           {"f_zbar", qcharm::io::to_json(fzb)},
           {"d_phi", qcharm::io::to_json(src.map.d_phi(p))},
           {"d_r", qcharm::io::to_json(src.map.d_r(p))}};
    if (cli.csv_out) {
        auto f = src.map.evaluate(p);
        emit(cli, qcharm::io::csv({"r", "phi", "re_f", "im_f"}, {{cli.r, cli.phi, f.real(), f.imag()}}));
    } else {
        emit(cli, dump(j));
    }
    return 0;
}

int cmd_qc(const Cli& cli)
{
    auto src = qcharm::load_map(cli.cfg.map, cli.cfg.N, cli.cfg.curve);
    auto q = qcharm::measure_qc(src.map, cli.cfg.radii, std::max<std::size_t>(64, cli.cfg.n_phi));
    json j = qcharm::io::to_json(q);
    try {
        auto h = qcharm::heinz_check(src.map);
        j["heinz"] = {{"lhs", h.lhs}, {"bound", h.bound}, {"pass", h.pass}};
    } catch (const qcharm::PreconditionError& e) {
        j["heinz"] = {{"skipped", e.what()}};
    }
    auto d = qcharm::dz0_lower_bound(src.map, src.curve, q.K);
    j["dz0"] = {{"lhs", d.lhs}, {"rhs", d.rhs}, {"pass", d.pass}};
    j["C_K"] = qcharm::ck_constant(q.K);
    std::string text = dump(j);
    if (!cli.cfg.report.empty()) qcharm::io::write_text_file(cli.cfg.report, text);
    if (cli.cfg.report.empty() || !cli.out.empty()) emit(cli, text);
    return q.distortion_holds ? 0 : 1;
}

int cmd_weights(const Cli& cli)
{
    auto src = qcharm::load_map(cli.cfg.map, cli.cfg.N, cli.cfg.curve);
    auto w = qcharm::boundary_weight(src.map);
    if (!cli.dump_weight.empty()) qcharm::io::write_text_file(cli.dump_weight, qcharm::io::weight_csv(w));
    const int depth = cli.cfg.depth;
    json j;
    std::vector<double> trace;
    if (cli.check == "probe") {
        j = qcharm::io::to_json(qcharm::integrability_probe(w, cli.cfg.kappa, cli.cfg.lambda));
    } else {
        qcharm::ConditionReport rep;
        if (cli.check == "ap") rep = qcharm::check_ap(w, cli.cfg.p, depth);
        else if (cli.check == "cf-i") rep = qcharm::check_cf_i(w, depth);
        else if (cli.check == "cf-ii") rep = qcharm::check_cf_ii(w, cli.cfg.eps, depth);
        else if (cli.check == "gehring") rep = qcharm::check_gehring(w, cli.cfg.q, depth);
        else if (cli.check == "bmo") rep = qcharm::bmo_norm(qcharm::log_samples(w), depth);
        else if (cli.check == "bmo-conjugate") rep = qcharm::bmo_norm(qcharm::conjugate_function(qcharm::log_samples(w)), depth);
        else throw qcharm::IoError("unknown check '" + cli.check + "' (valid: ap, cf-i, cf-ii, gehring, bmo, bmo-conjugate, probe)");
        j = qcharm::io::to_json(rep);
        trace = rep.per_depth;
    }
    if (cli.csv_out && !trace.empty()) emit(cli, qcharm::io::trace_csv(trace));
    else emit(cli, dump(j));
    return 0;
}

int cmd_lindelof(const Cli& cli)
{
    auto src = qcharm::load_map(cli.cfg.map, cli.cfg.N, cli.cfg.curve);
    if (cli.identity_check) {
        auto idc = qcharm::lindelof_identity_check(src.map, src.curve, cli.cfg.n_phi);
        if (cli.csv_out) {
            std::vector<std::vector<double>> rows;
            for (std::size_t j = 0; j < idc.phi.size(); ++j)
                rows.push_back({idc.phi[j], idc.u_limit[j], idc.target[j], std::abs(idc.u_limit[j] - idc.target[j]), idc.defect[j]});
            emit(cli, qcharm::io::csv({"phi", "U_limit", "beta_minus_phi", "error", "defect"}, rows));
        } else {
            json per = json::array();
            for (std::size_t j = 0; j < idc.phi.size(); ++j)
                per.push_back({{"phi", idc.phi[j]}, {"U_limit", idc.u_limit[j]}, {"beta_minus_phi", idc.target[j]}, {"defect", idc.defect[j]}});
            emit(cli, dump({{"max_error", idc.max_error}, {"angles", per}}));
        }
        return 0;
    }
    auto field = qcharm::angle_field(src.map, cli.cfg.radii, cli.cfg.n_phi);
    if (cli.json_out) {
        emit(cli, dump({{"radii", field.radii}, {"n_phi", field.n_phi}, {"anchor", field.anchor}, {"U", field.values}}));
    } else {
        emit(cli, qcharm::io::field_csv(field));
    }
    return 0;
}

int cmd_suite(const Cli& cli)
{
    auto rep = qcharm::run_suite(cli.cfg);
    std::string text = dump(rep.to_json(cli.cfg.timing));
    if (!cli.cfg.report.empty()) qcharm::io::write_text_file(cli.cfg.report, text);
    else if (cli.out.empty()) std::cout << text;
    if (!cli.out.empty()) qcharm::io::write_text_file(cli.out, text);
    for (const auto& e : cli.cfg.emit) {
        auto colon = e.find(':');
        if (colon == std::string::npos) throw qcharm::IoError("--emit expects tag:path, got '" + e + "'");
        qcharm::emit_plot_data(rep, e.substr(0, colon), e.substr(colon + 1));
    }
    for (const auto& m : rep.maps)
        for (const auto& f : m.failures) std::cerr << m.label << ": " << f << "\n";
    return rep.passed ? 0 : 1;
}

/// Names of the options given explicitly on the command line, in config-key spelling.
std::vector<std::string> explicit_keys(const CLI::App& sub)
{
    std::vector<std::string> keys;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->count() == 0) continue;
        std::string name = opt->get_single_name();
        for (auto& c : name)
            if (c == '-') c = '_';
        if (name == "spec") name = "map";
        keys.push_back(name);
    }
    return keys;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qcharm: harmonic-map, weight-condition and boundary-angle diagnostics"};
    app.require_subcommand(1);
    Cli cli;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--map,--spec", cli.cfg.map, "catalog name, map-spec JSON or coefficient JSON");
        sub->add_option("--curve", cli.cfg.curve, "curve JSON overriding the target curve");
        sub->add_option("--N", cli.cfg.N, "truncation order (power of two)");
        sub->add_option("--seed", cli.cfg.seed, "seed for sampled checks");
        sub->add_option("--config", cli.config_path, "JSON config file");
        sub->add_flag("--config-priority", cli.config_priority, "config file overrides command-line flags");
        sub->add_flag("--json", cli.json_out, "JSON output");
        sub->add_flag("--csv", cli.csv_out, "CSV output");
        sub->add_option("--out", cli.out, "output file (default stdout)");
        sub->add_option("--radii", cli.cfg.radii, "radii list")->delimiter(',');
        sub->add_option("--n-phi", cli.cfg.n_phi, "angles per radius");
        sub->add_option("--depth", cli.cfg.depth, "dyadic scan depth");
        sub->add_option("--report", cli.cfg.report, "JSON report path");
    };

    auto* eval = app.add_subcommand("eval", "evaluate f and its derivatives at r e^{i phi}");
    add_common(eval);
    eval->add_option("--r", cli.r, "radius in [0, 1)");
    eval->add_option("--phi", cli.phi, "angle");

    auto* qc = app.add_subcommand("qc", "distortion measurement and pointwise bounds");
    add_common(qc);

    auto* weights = app.add_subcommand("weights", "weight-condition checks on w = |d/dt f*|");
    add_common(weights);
    weights->add_option("--check", cli.check, "ap | cf-i | cf-ii | gehring | bmo | bmo-conjugate | probe");
    weights->add_option("--p", cli.cfg.p, "A_p exponent");
    weights->add_option("--q", cli.cfg.q, "Gehring exponent");
    weights->add_option("--eps", cli.cfg.eps, "mass fraction for condition (ii)");
    weights->add_option("--dump-weight", cli.dump_weight, "write w samples as CSV (t, w)");

    auto* lindelof = app.add_subcommand("lindelof", "angle field and tangent-angle identity");
    add_common(lindelof);
    lindelof->add_flag("--identity-check", cli.identity_check, "compare boundary limits with beta - phi");

    auto* suite = app.add_subcommand("suite", "all diagnostics over one map or the catalog");
    add_common(suite);
    suite->add_option("--p", cli.cfg.p, "A_p exponent");
    suite->add_option("--q", cli.cfg.q, "Gehring exponent");
    suite->add_option("--eps", cli.cfg.eps, "mass fraction for condition (ii)");
    suite->add_option("--emit", cli.cfg.emit, "plot data as tag:path (repeatable)");
    suite->add_flag("--timing", cli.cfg.timing, "include stage timings in the report");

    // defaults differ per command
    cli.cfg.map = "";
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* active = app.get_subcommands().front();
    cli.cfg.command = active->get_name();
    try {
        if (!cli.config_path.empty()) {
            qcharm::merge_config(cli.cfg, qcharm::io::read_json_file(cli.config_path), explicit_keys(*active), cli.config_priority);
        }
        if (cli.cfg.map.empty()) cli.cfg.map = cli.cfg.command == "suite" ? "catalog" : "identity";
        cli.cfg.validate();
        if (cli.cfg.command == "eval") return cmd_eval(cli);
        if (cli.cfg.command == "qc") return cmd_qc(cli);
        if (cli.cfg.command == "weights") return cmd_weights(cli);
        if (cli.cfg.command == "lindelof") return cmd_lindelof(cli);
        return cmd_suite(cli);
    } catch (const qcharm::Error& e) {
        std::cerr << "qcharm " << cli.cfg.command << ": " << e.what() << "\n";
        return 1;
    }
}
