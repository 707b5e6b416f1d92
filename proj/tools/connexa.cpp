#include <CLI11.hpp>

#include <deque>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "connexa/cli.hpp"

using namespace connexa;
using namespace connexa::cli;

int main(int argc, char** argv) {
    CLI::App app{"connexa: exact classification of rank-2 (TE)-structures over the F-manifold N2"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--order-z", opt.order_z, "truncate inputs (or size outputs) to this z-order")->check(CLI::PositiveNumber);
    app.add_option("--order-t", opt.order_t, "truncate inputs (or size outputs) to this t-order")->check(CLI::PositiveNumber);
    app.add_option("--nmax", opt.nmax, "search bound for the Birkhoff isomorphism quartic")->check(CLI::Range(2, 100000));
    app.add_option("--kmax", opt.kmax, "eigen-line search over k in [-kmax, kmax]")->check(CLI::PositiveNumber);
    app.add_option("--fixtures", opt.fixtures, "fixture directory (CONNEXA_FIXTURES overrides)");

    std::function<Outcome()> action;
    std::deque<std::string> paths;  // stable addresses for the positional arguments
    auto file_cmd = [&](const char* name, const char* help, Outcome (*fn)(const std::string&, const Options&)) {
        auto* sub = app.add_subcommand(name, help);
        std::string* path = &paths.emplace_back();
        sub->add_option("input", *path, "structure document or fixture name")->required();
        sub->callback([&, name, fn, path] { action = [=, &opt] { return run_guarded(name, [&] { return fn(*path, opt); }); }; });
    };
    file_cmd("verify", "flatness residuals", cmd_verify);
    file_cmd("prenormal", "reduce to the pre-normal shape", cmd_prenormal);
    file_cmd("formal-nf", "formal normal form with a replayable log", cmd_formal_nf);
    file_cmd("classify", "holomorphic classification", cmd_classify);

    std::string iso_a, iso_b;
    auto* fiso = app.add_subcommand("formal-iso", "formal isomorphism decision for two structures");
    fiso->add_option("a", iso_a)->required();
    fiso->add_option("b", iso_b)->required();
    fiso->callback([&] { action = [&] { return run_guarded("formal-iso", [&] { return cmd_formal_iso(iso_a, iso_b, opt); }); }; });

    std::string ta, tb;
    auto* biso = app.add_subcommand("birkhoff-iso", "isomorphism decision for Birkhoff data tuples c,alpha,c0,c1");
    biso->add_option("a", ta)->required();
    biso->add_option("b", tb)->required();
    biso->callback([&] { action = [&] { return run_guarded("birkhoff-iso", [&] { return cmd_birkhoff_iso(ta, tb, opt); }); }; });

    std::string mc = "0", malpha = "0", mc0, mc1 = "0";
    auto* mal = app.add_subcommand("malgrange", "Malgrange unfolding of Birkhoff data as a structure document");
    mal->add_option("--c", mc);
    mal->add_option("--alpha", malpha);
    mal->add_option("--c0", mc0)->required();
    mal->add_option("--c1", mc1);
    mal->callback([&] {
        action = [&] {
            return run_guarded("malgrange", [&] {
                return cmd_malgrange(Scalar::parse(mc), Scalar::parse(malpha), Scalar::parse(mc0), Scalar::parse(mc1), opt);
            });
        };
    });

    std::string family;
    std::vector<std::string> params;
    auto* nf = app.add_subcommand("normal-form", "instantiate a normal form as a structure document");
    nf->add_option("family", family, "F1, Fr, NF3-1 .. NF3-9, HNF-Mal1 .. HNF-Mal3")->required();
    nf->add_option("params", params, "name=value pairs");
    nf->callback([&] { action = [&] { return run_guarded("normal-form", [&] { return cmd_normal_form(family, params, opt); }); }; });

    std::string g, ec = "0";
    auto euler_cmd = [&](const char* name, const char* help, Outcome (*fn)(const std::string&, const Scalar&, const Options&)) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--g", g, "coefficients of g, comma separated, lowest first")->required();
        sub->add_option("--c", ec, "the constant c of the Euler field");
        sub->callback([&, name, fn] { action = [&, name, fn] { return run_guarded(name, [&] { return fn(g, Scalar::parse(ec), opt); }); }; });
    };
    euler_cmd("euler-nf", "Euler field normal form", cmd_euler_nf);
    euler_cmd("euler-realizable", "realizability of an Euler field by a (TE)-structure", cmd_euler_realizable);

    auto* st = app.add_subcommand("selftest", "run the acceptance suite");
    st->callback([&] { action = [&] { return run_guarded("selftest", [&] { return cmd_selftest(opt); }); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }

    Outcome out = action();
    if (out.document)
        std::cout << *out.document;
    else
        std::cout << dump(out.report);
    if (out.report.contains("error")) std::cerr << "connexa: " << out.report["error"]["message"].get<std::string>() << "\n";
    return out.code;
}
