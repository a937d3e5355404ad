#include "fedosov/verification.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace fedosov;

namespace {

struct CommonArgs {
    std::string config;
    std::string report_path;
    std::string payload_path;
    int order = 0;  // 0: use the presentation default
    int splitting = 1;
    bool json_stdout = false;
    std::string point;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool need_config = true) {
    auto* opt = cmd->add_option("--config", args.config, "presentation file (JSON)");
    if (need_config) opt->required();
    cmd->add_option("--order", args.order, "truncation order override");
    cmd->add_option("--splitting", args.splitting, "homotopy splitting for the solve")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--report", args.report_path, "write the JSON report to this path");
    cmd->add_option("--payload", args.payload_path,
                    "write the digest-stable payload alone (golden-file form)");
    cmd->add_flag("--json", args.json_stdout, "print the JSON report to stdout");
}

std::vector<Rational> parse_point(const std::string& s) {
    std::vector<Rational> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(rat_from_string(cur));
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(rat_from_string(cur));
    return out;
}

Json load_inline_or_file(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw StructuralError("cannot open " + arg.substr(1));
        return Json::parse(in);
    }
    return Json::parse(arg);
}

int emit(const std::string& command, const LiePairPresentation& p, const VerifyOptions& o,
         const std::vector<CheckOutcome>& checks, const Json& artifacts,
         const CommonArgs& args, double seconds) {
    Json payload = report_payload(command, p, o, checks);
    if (!artifacts.is_null()) payload["artifacts"] = artifacts;
    Json report;
    report["payload"] = payload;
    report["duration_seconds"] = seconds;

    if (!args.report_path.empty()) {
        std::ofstream out(args.report_path);
        out << report.dump(2) << "\n";
    }
    if (!args.payload_path.empty()) {
        std::ofstream out(args.payload_path);
        out << payload.dump(2) << "\n";
    }
    if (args.json_stdout) {
        std::cout << report.dump(2) << "\n";
    } else {
        for (auto& c : checks)
            std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " (" << c.tag << ")"
                      << (c.pass ? "" : "  residual: " + c.residual) << "\n";
        std::cout << (all_pass(checks) ? "status: pass" : "status: FAIL") << "\n";
    }
    return all_pass(checks) ? 0 : 1;
}

using Clock = std::chrono::steady_clock;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact engine for homological structures of Lie pairs"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string conn1_arg, conn2_arg;
    int geo_dim = 0;

    auto* c_validate = app.add_subcommand("validate", "structure equations of a presentation");
    add_common(c_validate, args);
    auto* c_fedosov =
        app.add_subcommand("fedosov", "homological vector fields and their flatness");
    add_common(c_fedosov, args);
    auto* c_pbw = app.add_subcommand("pbw", "coalgebra isomorphism tables and consistency");
    add_common(c_pbw, args);
    auto* c_phi = app.add_subcommand("phi", "the intertwining vertical automorphism");
    add_common(c_phi, args);
    auto* c_log = app.add_subcommand("log", "logarithm of the intertwiner, both backends");
    add_common(c_log, args);
    auto* c_geo = app.add_subcommand("geodesic", "three-way jet comparison on a chart");
    add_common(c_geo, args, false);
    c_geo->add_option("--connection1", conn1_arg, "inline Christoffel JSON or @file");
    c_geo->add_option("--connection2", conn2_arg, "inline Christoffel JSON or @file");
    c_geo->add_option("--dim", geo_dim, "chart dimension for inline connections");
    c_geo->add_option("--point", args.point, "base point, comma-separated rationals");
    auto* c_all = app.add_subcommand("verify-all", "every identity suite");
    add_common(c_all, args);

    CLI11_PARSE(app, argc, argv);

    try {
        LiePairPresentation p;
        if (!args.config.empty()) {
            p = load_presentation(args.config);
        } else if (app.got_subcommand(c_geo)) {
            if (conn1_arg.empty() || conn2_arg.empty() || geo_dim < 1)
                throw StructuralError(
                    "geodesic needs --config or --dim with --connection1/--connection2");
            Frame f{geo_dim, 0, BaseMode::Chart, geo_dim};
            p = LiePairPresentation(f, 6);
            for (int i = 1; i <= geo_dim; ++i)
                p.rho(i, i) = Coefficient::constant(BaseMode::Chart, geo_dim, 1);
            for (int which : {1, 2}) {
                Json entries = load_inline_or_file(which == 1 ? conn1_arg : conn2_arg);
                for (auto& e : entries)
                    p.connection(which).at(f, e.at("i").get<int>(), e.at("j").get<int>(),
                                           e.at("k").get<int>()) =
                        coefficient_from_json(e.at("value"), BaseMode::Chart, geo_dim);
            }
        } else {
            throw StructuralError("--config is required");
        }

        VerifyOptions opts;
        opts.order = args.order > 0 ? args.order : p.default_trunc();
        opts.splitting = args.splitting;
        if (!args.point.empty()) opts.base_point = parse_point(args.point);
        if (opts.order < 2)
            throw StructuralError("commands touching the homological tail need order >= 2");

        auto t0 = Clock::now();
        std::vector<CheckOutcome> checks;
        Json artifacts;
        std::string command;

        if (app.got_subcommand(c_validate)) {
            command = "validate";
            checks = checks_validate(p);
        } else if (app.got_subcommand(c_fedosov)) {
            command = "fedosov";
            checks = checks_fedosov(p, opts);
            Contraction ctx(p, 1);
            BForm x = fedosov_vector_field(p, 1, ctx, opts.order);
            artifacts["x1"] = bform_to_json(x);
            FedosovField q = assemble_q(p, 1, x);
            Json images = Json::array();
            for (int j = 1; j <= p.frame().r; ++j) {
                FormalFunction gen = FormalFunction::eta_monomial(
                    p.frame(), opts.order, MultiIndex::unit(p.frame().r, j - 1));
                images.push_back(Json{{"generator", j},
                                      {"terms", formal_function_to_json(q.apply(gen))}});
            }
            artifacts["q1_on_generators"] = images;
        } else if (app.got_subcommand(c_pbw)) {
            command = "pbw";
            checks = checks_pbw(p, opts);
            PbwContext ctx(p, 1, 1, opts.order);
            Json table = Json::array();
            for_each_up_to_degree(p.frame().r, opts.order, [&](const MultiIndex& j) {
                table.push_back(Json{{"source", j.e},
                                     {"image", enveloping_to_json(ctx.pbw_basis(j))}});
            });
            artifacts["pbw1"] = table;
        } else if (app.got_subcommand(c_phi)) {
            command = "phi";
            checks = checks_phi(p, opts);
            FedosovField q1 = make_fedosov_field(p, 1, 1, opts.order);
            FedosovField q2 = make_fedosov_field(
                p, 2, (p.frame().rp > 0 && !p.offset().is_zero()) ? 2 : 1, opts.order);
            VerticalOperator phi = solve_phi(q1, q2, Contraction(p, opts.splitting));
            artifacts["phi"] = vertical_operator_to_json(phi);
            artifacts["y"] = bform_to_json(log_operator(phi));
        } else if (app.got_subcommand(c_log)) {
            command = "log";
            checks = checks_log(p, opts);
            FedosovField q1 = make_fedosov_field(p, 1, 1, opts.order);
            FedosovField q2 = make_fedosov_field(
                p, 2, (p.frame().rp > 0 && !p.offset().is_zero()) ? 2 : 1, opts.order);
            VerticalOperator phi = solve_phi(q1, q2, Contraction(p, opts.splitting));
            artifacts["phi"] = vertical_operator_to_json(phi);
            artifacts["y"] = bform_to_json(log_operator(phi));
        } else if (app.got_subcommand(c_geo)) {
            command = "geodesic";
            checks = checks_geodesic(p, opts);
            if (checks.empty())
                throw StructuralError("geodesic requires a tangent pair over a chart");
            ChristoffelData g1 = christoffel_from_presentation(p, 1);
            ChristoffelData g2 = christoffel_from_presentation(p, 2);
            std::vector<Rational> base = opts.base_point;
            if (static_cast<int>(base.size()) != p.frame().n)
                base.assign(p.frame().n, Rational(0));
            artifacts["transition_jet"] =
                jet_map_to_json(transition_jet(g1, g2, base, opts.order));
        } else {
            command = "verify-all";
            checks = checks_all(p, opts);
        }
        double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return emit(command, p, opts, checks, artifacts, args, seconds);
    } catch (const StructuralError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
