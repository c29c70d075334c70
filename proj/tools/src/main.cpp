// Batch front-end over the bvinf library: ingest JSON configs, run the
// verification suites, emit deterministic reports.
//
// Exit codes: 0 all checks pass, 1 at least one check fails, 2 unusable
// input (bad flags, unreadable or malformed configs, windows too small for
// the requested sweep).

#include <boost/program_options.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bvinf/config.hpp"
#include "bvinf/fixtures.hpp"
#include "bvinf/mc.hpp"
#include "bvinf/textio.hpp"

namespace po = boost::program_options;
using namespace bvinf;

namespace {

struct CommonFlags {
    std::optional<int> n_hbar, n_poly, n_param;
    int arity_max = 4;
    std::string report_path;
    std::string format = "text";
};

void add_common(po::options_description& desc) {
    desc.add_options()
        ("n-hbar", po::value<int>(), "override the h-adic window of loaded algebras")
        ("n-poly", po::value<int>(), "override the polynomial window of loaded algebras")
        ("n-param", po::value<int>(), "override the parameter-order window of loaded algebras")
        ("arity-max", po::value<int>()->default_value(4), "highest bracket/cumulant arity swept")
        ("report", po::value<std::string>(), "write the report to this path instead of stdout")
        ("format", po::value<std::string>()->default_value("text"), "report format: text or json")
        ("help", "describe this subcommand");
}

CommonFlags read_common(const po::variables_map& vm) {
    CommonFlags f;
    if (vm.count("n-hbar")) f.n_hbar = vm["n-hbar"].as<int>();
    if (vm.count("n-poly")) f.n_poly = vm["n-poly"].as<int>();
    if (vm.count("n-param")) f.n_param = vm["n-param"].as<int>();
    f.arity_max = vm["arity-max"].as<int>();
    if (vm.count("report")) f.report_path = vm["report"].as<std::string>();
    f.format = vm["format"].as<std::string>();
    if (f.format != "text" && f.format != "json")
        throw po::error("--format must be 'text' or 'json'");
    return f;
}

BVAlgebraInstance load_algebra_with(const std::string& path, const CommonFlags& f) {
    nlohmann::json j = load_json_file(path);
    if (j.contains("truncation")) {
        if (f.n_poly) j["truncation"]["poly"] = *f.n_poly;
        if (f.n_hbar) j["truncation"]["hbar"] = *f.n_hbar;
        if (f.n_param) j["truncation"]["param"] = *f.n_param;
    }
    return algebra_from_json(j);
}

int emit(const VerificationReport& rep, const CommonFlags& f) {
    std::string body = f.format == "json" ? rep.to_json() : rep.to_text();
    if (body.empty() || body.back() != '\n') body += '\n';
    if (f.report_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(f.report_path);
        if (!out) {
            std::cerr << "error: cannot write '" << f.report_path << "'\n";
            return 2;
        }
        out << body;
        std::cout << rep.subject() << ": " << (rep.all_passed() ? "PASS" : "FAIL") << "\n";
    }
    return rep.all_passed() ? 0 : 1;
}

po::variables_map parse_args(const std::vector<std::string>& args,
                             const po::options_description& desc, int max_inputs,
                             std::vector<std::string>& inputs) {
    po::options_description all = desc;
    all.add_options()("input", po::value<std::vector<std::string>>(), "input files");
    po::positional_options_description pos;
    pos.add("input", max_inputs);
    po::variables_map vm;
    po::store(po::command_line_parser(args).options(all).positional(pos).run(), vm);
    po::notify(vm);
    if (vm.count("input")) inputs = vm["input"].as<std::vector<std::string>>();
    return vm;
}

void require_inputs(const std::vector<std::string>& inputs, std::size_t n, const char* what) {
    if (inputs.size() != n)
        throw po::error(std::string(what) + ": expected " + std::to_string(n) +
                        " input file(s), got " + std::to_string(inputs.size()));
}

// ---------------------------------------------------------------------------

int cmd_check_bv(const std::vector<std::string>& args) {
    po::options_description desc("check-bv <algebra.json> -- family axiom verification");
    add_common(desc);
    std::vector<std::string> inputs;
    auto vm = parse_args(args, desc, 1, inputs);
    if (vm.count("help")) {
        std::cout << desc << "\n";
        return 0;
    }
    require_inputs(inputs, 1, "check-bv");
    CommonFlags f = read_common(vm);
    auto inst = load_algebra_with(inputs[0], f);
    BVVerifyOptions opt;
    opt.arity_max = f.arity_max;
    return emit(verify_bv(inst, opt), f);
}

int cmd_check_morphism(const std::vector<std::string>& args) {
    po::options_description desc(
        "check-morphism <source.json> <target.json> <morphism.json> -- morphism verification");
    add_common(desc);
    std::vector<std::string> inputs;
    auto vm = parse_args(args, desc, 3, inputs);
    if (vm.count("help")) {
        std::cout << desc << "\n";
        return 0;
    }
    require_inputs(inputs, 3, "check-morphism");
    CommonFlags f = read_common(vm);
    auto dom = load_algebra_with(inputs[0], f);
    auto cod = load_algebra_with(inputs[1], f);
    auto mor = load_morphism(inputs[2], dom, cod);
    MorphismVerifyOptions opt;
    opt.arity_max = f.arity_max;
    return emit(verify_morphism(mor, opt), f);
}

int cmd_solve_mc(const std::vector<std::string>& args) {
    po::options_description desc("solve-mc <algebra.json> -- universal Maurer-Cartan solution");
    add_common(desc);
    desc.add_options()
        ("order", po::value<int>()->default_value(3), "parameter-adic solution order")
        ("reps", po::value<std::string>(),
         "comma-separated representative indices to deform along (default: all)")
        ("gamma-out", po::value<std::string>(), "write the solution as a gamma document");
    std::vector<std::string> inputs;
    auto vm = parse_args(args, desc, 1, inputs);
    if (vm.count("help")) {
        std::cout << desc << "\n";
        return 0;
    }
    require_inputs(inputs, 1, "solve-mc");
    CommonFlags f = read_common(vm);
    auto inst = load_algebra_with(inputs[0], f);
    Contraction con(inst);
    MCSolveOptions opt;
    opt.max_order = vm["order"].as<int>();
    if (vm.count("reps")) {
        std::stringstream ss(vm["reps"].as<std::string>());
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) opt.rep_subset.push_back(std::stoul(tok));
    }
    auto sol = solve_mc(con, opt);
    VerificationReport rep = sol.report;
    rep.set_output("gamma", sol.gamma.to_string());
    if (vm.count("gamma-out")) save_json_file(vm["gamma-out"].as<std::string>(),
                                              gamma_to_json(sol.gamma));
    return emit(rep, f);
}

int cmd_twist(const std::vector<std::string>& args) {
    po::options_description desc(
        "twist <algebra.json> <gamma.json> -- twisted-family verification");
    add_common(desc);
    desc.add_options()("probes", po::value<int>()->default_value(20),
                       "random window probes per identity");
    std::vector<std::string> inputs;
    auto vm = parse_args(args, desc, 2, inputs);
    if (vm.count("help")) {
        std::cout << desc << "\n";
        return 0;
    }
    require_inputs(inputs, 2, "twist");
    CommonFlags f = read_common(vm);
    auto inst = load_algebra_with(inputs[0], f);
    auto gamma = load_gamma(inputs[1], inst.sig);
    TwistVerifyOptions opt;
    opt.probe_count = vm["probes"].as<int>();
    return emit(verify_twist(inst, gamma, opt), f);
}

int cmd_pairing(const std::vector<std::string>& args) {
    po::options_description desc(
        "pairing <algebra.json> <pairing.json> [<target.json> <morphism.json> "
        "<target-pairing.json>] -- pairing axioms, polarization, degeneration, and "
        "(with a morphism) compatibility");
    add_common(desc);
    std::vector<std::string> inputs;
    auto vm = parse_args(args, desc, 5, inputs);
    if (vm.count("help")) {
        std::cout << desc << "\n";
        return 0;
    }
    if (inputs.size() != 2 && inputs.size() != 5)
        throw po::error("pairing: expected 2 or 5 input files, got " +
                        std::to_string(inputs.size()));
    CommonFlags f = read_common(vm);
    auto inst = load_algebra_with(inputs[0], f);
    auto pa = load_pairing(inputs[1], inst.sig);

    VerificationReport rep("pairing(" + inst.name + ")");
    rep.merge(verify_pairing_axioms(pa));
    rep.merge(polarization_check(pa));
    Contraction con(inst);
    rep.merge(check_degeneration(con));
    if (inputs.size() == 5) {
        auto cod = load_algebra_with(inputs[2], f);
        auto mor = load_morphism(inputs[3], inst, cod);
        auto pb = load_pairing(inputs[4], cod.sig);
        Contraction con_b(cod);
        rep.merge(verify_pairing_axioms(pb));
        rep.merge(check_pairing_compatibility(mor, pa, pb, con, con_b));
    }
    return emit(rep, f);
}

int cmd_demo_a1(const std::vector<std::string>& args) {
    po::options_description desc(
        "demo-a1 -- reproduce the quadratic-potential example end to end");
    add_common(desc);
    std::vector<std::string> inputs;
    auto vm = parse_args(args, desc, 0, inputs);
    if (vm.count("help")) {
        std::cout << desc << "\n";
        return 0;
    }
    require_inputs(inputs, 0, "demo-a1");
    CommonFlags f = read_common(vm);
    Truncation t{f.n_poly.value_or(12), f.n_hbar.value_or(6), f.n_param.value_or(4), 0};

    auto bundle = build_a1(t);
    auto companion = build_a2(t);
    VerificationReport rep("demo-a1");
    rep.set_context("n_poly", std::to_string(t.poly));
    rep.set_context("n_hbar", std::to_string(t.hbar));
    rep.set_context("n_param", std::to_string(t.param));

    BVVerifyOptions bv;
    bv.arity_max = f.arity_max;
    rep.merge(verify_bv(bundle.source, bv));
    rep.merge(verify_bv(*bundle.target, bv));
    rep.merge(verify_bv(companion.source, bv));
    rep.merge(verify_morphism(*bundle.f));

    // Wick moments against the morphism components.
    {
        bool ok = true;
        std::string w;
        const int top = std::min(6, t.hbar);
        for (int k = 0; k <= top && ok; ++k) {
            AlgebraElement p = AlgebraElement::unit(bundle.source.sig);
            auto gen = AlgebraElement::generator(bundle.source.sig, 0);
            for (int i = 0; i < 2 * k; ++i) p = p * gen;
            auto comp = bundle.f->map.apply_component(std::size_t(k), p);
            if (!(ScalarLaurent::hbar_power(k, comp.scalar_part()) == wick_moment(k))) {
                ok = false;
                w = "k = " + std::to_string(k);
            }
        }
        rep.add("wick-moments-match-components", ok,
                ok ? "perfect-matching sums equal the moment components for k <= " +
                         std::to_string(top)
                   : w);
    }

    Contraction con_a(bundle.source);
    Contraction con_b(*bundle.target);
    Contraction con_c(companion.source);

    auto slice = cohomology(con_a, CohomologySlice::Which::order_zero);
    const auto* d0 = slice.at_degree(0);
    const auto* dm1 = slice.at_degree(-1);
    rep.add("betti-numbers", d0 && d0->betti == 1 && dm1 && dm1->betti == 0,
            "rank 1 in degree 0, rank 0 in degree -1");
    {
        bool ok = true;
        std::string w;
        auto gen = AlgebraElement::generator(bundle.source.sig, 0);
        AlgebraElement p = AlgebraElement::unit(bundle.source.sig);
        for (int k = 0; 2 * k <= std::min(t.poly, 10); ++k) {
            Rational c = double_factorial_odd(2 * k - 1);
            if (k % 2 != 0) c = -c;
            auto red = reduce_mod_image(con_a, LaurentSeries::from_element(p));
            if (!(red[0] == ScalarLaurent::hbar_power(k, c))) {
                ok = false;
                w = "t^" + std::to_string(2 * k);
                break;
            }
            if (2 * k + 1 <= t.poly &&
                !reduce_mod_image(con_a, LaurentSeries::from_element(p * gen))[0].is_zero()) {
                ok = false;
                w = "t^" + std::to_string(2 * k + 1);
                break;
            }
            p = p * gen * gen;
        }
        rep.add("reduction-values", ok,
                ok ? "t^{2k} -> (-1)^k (2k-1)!! h^k and odd powers -> 0" : w);
    }

    const PairingTable& pa = *bundle.source_pairing;
    rep.merge(verify_pairing_axioms(pa));
    rep.merge(polarization_check(pa));
    rep.add("pairing-table-sample", true,
            "(t^2, t^2) = " + scalar_laurent_to_string(pa.value(2, 2)));
    rep.merge(check_pairing_compatibility(*bundle.f, pa, *bundle.target_pairing, con_a, con_b));
    {
        auto cert = trace_infeasibility_certificate(pa);
        rep.add("source-pairing-is-not-a-trace", cert.has_value(),
                cert.value_or("a linear trace reproduces the table"));
    }

    auto sol_a = solve_mc(con_a, MCSolveOptions{std::min(5, t.param)});
    rep.merge(sol_a.report);
    rep.add("universal-solution-is-u-times-unit",
            sol_a.gamma == ParamSeries::term(sol_a.pack, UIndex({1}),
                                             LaurentSeries::unit(bundle.source.sig)),
            "gamma = " + sol_a.gamma.to_string());
    rep.merge(miniversality_check(con_a, sol_a.gamma));
    auto sol_c = solve_mc(con_c, MCSolveOptions{std::min(5, t.param)});
    rep.merge(sol_c.report);
    rep.merge(miniversality_check(con_c, sol_c.gamma));

    {
        auto pack = make_numbered_pack({0}, std::min(3, t.param));
        auto gen = AlgebraElement::generator(bundle.source.sig, 0);
        auto gamma = ParamSeries::term(pack, UIndex({1}), LaurentSeries::from_element(gen));
        rep.merge(verify_twist(bundle.source, gamma));
        auto pack2 = make_numbered_pack({0}, 2);
        auto gamma2 = ParamSeries::term(pack2, UIndex({1}), LaurentSeries::from_element(gen));
        rep.merge(verify_twisted_morphism(*bundle.f, gamma2));
    }

    rep.merge(check_degeneration(con_a));
    rep.merge(check_degeneration(con_c));
    rep.merge(check_degeneration(con_b));
    return emit(rep, f);
}

int usage(std::ostream& os) {
    os << "usage: bvinf <command> [inputs] [flags]\n"
          "commands:\n"
          "  check-bv        algebra.json -- verify the family axioms\n"
          "  check-morphism  source.json target.json morphism.json\n"
          "  solve-mc        algebra.json [--order N] [--reps i,j] [--gamma-out path]\n"
          "  twist           algebra.json gamma.json [--probes N]\n"
          "  pairing         algebra.json pairing.json [target.json morphism.json "
          "target-pairing.json]\n"
          "  demo-a1         [--n-poly N] [--n-hbar N] [--n-param N]\n"
          "common flags: --n-hbar --n-poly --n-param --arity-max --report <path> "
          "--format text|json\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) return usage(std::cerr);
    std::string cmd = args.front();
    args.erase(args.begin());
    if (cmd == "--help" || cmd == "help") {
        usage(std::cout);
        return 0;
    }
    try {
        if (cmd == "check-bv") return cmd_check_bv(args);
        if (cmd == "check-morphism") return cmd_check_morphism(args);
        if (cmd == "solve-mc") return cmd_solve_mc(args);
        if (cmd == "twist") return cmd_twist(args);
        if (cmd == "pairing") return cmd_pairing(args);
        if (cmd == "demo-a1") return cmd_demo_a1(args);
        std::cerr << "error: unknown command '" << cmd << "'\n";
        return usage(std::cerr);
    } catch (const po::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
