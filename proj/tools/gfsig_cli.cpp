// gfsig: generate signature families, verify coherence bounds, run detection
// experiments and the null-space sign-ratio test.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gfsig/commands.hpp"

namespace {

void add_family_flags(CLI::App* cmd, std::string& family, long& L, long& p, long& m, long& H) {
    cmd->add_option("--family", family, "cubic | pr | sidelnikov | trace")->required();
    cmd->add_option("--L", L, "sequence length (prime) for cubic and pr");
    cmd->add_option("--p", p, "field characteristic for sidelnikov and trace");
    cmd->add_option("--m", m, "extension degree for sidelnikov and trace");
    cmd->add_option("--H", H, "alphabet size (pr: divides L-1, sidelnikov: divides p^m-1)");
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic non-orthogonal signatures for grant-free access"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a masking family and print its seed and sizes");
    std::string gen_family;
    gfsig::GenOptions gen_opt;
    add_family_flags(gen, gen_family, gen_opt.spec.L, gen_opt.spec.p, gen_opt.spec.m, gen_opt.spec.H);
    gen->add_option("--Q", gen_opt.per_device, "signatures per device");
    gen->add_option("--Nd", gen_opt.num_devices, "devices in the exported matrix (default: capacity)");
    gen->add_option("--out", gen_opt.seed_out, "write the seed sequence to this file");
    gen->add_option("--matrix", gen_opt.matrix_out, "write the signature matrix CSV to this file");

    // verify
    auto* verify = app.add_subcommand("verify", "check coherence against Welch and closed-form bounds");
    std::string ver_family;
    gfsig::FamilySpec ver_spec;
    gfsig::VerifyOptions ver_opt;
    verify->add_option("--family", ver_family, "single family to check (default: built-in grid)");
    verify->add_option("--L", ver_spec.L);
    verify->add_option("--p", ver_spec.p);
    verify->add_option("--m", ver_spec.m);
    verify->add_option("--H", ver_spec.H);
    verify->add_option("--Q", ver_opt.per_device, "signatures per device");
    verify->add_flag("--corrupt", ver_opt.corrupt, "duplicate one column before checking");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo detection experiment");
    std::string config_path, sim_out;
    sim->add_option("config", config_path, "experiment config file (key = value)")->required();
    sim->add_option("--out", sim_out, "CSV output path (overrides the config)");

    // a1
    auto* a1 = app.add_subcommand("a1", "null-space sign-ratio test");
    gfsig::A1Options a1_opt;
    std::string a1_families = "cubic,pr,gaussian,musa,qpsk";
    long a1_L = 23, a1_p = 5, a1_m = 2;
    a1->add_option("--families", a1_families, "comma-separated families");
    a1->add_option("--L", a1_L, "length for cubic, pr and random families");
    a1->add_option("--p", a1_p, "field characteristic for sidelnikov and trace");
    a1->add_option("--m", a1_m, "extension degree for sidelnikov and trace");
    a1->add_option("--Nd", a1_opt.num_devices);
    a1->add_option("--Q", a1_opt.per_device);
    a1->add_option("--samples", a1_opt.samples);
    a1->add_option("--seed", a1_opt.seed);

    // bench
    auto* bench = app.add_subcommand("bench", "time generation, coherence and one trial for a config");
    std::string bench_config;
    bench->add_option("config", bench_config, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            gen_opt.spec.family = gfsig::parse_family(gen_family);
            return gfsig::cmd_gen(gen_opt, std::cout, std::cerr);
        }
        if (*verify) {
            if (!ver_family.empty()) {
                ver_spec.family = gfsig::parse_family(ver_family);
                ver_opt.grid = {ver_spec};
            }
            return gfsig::cmd_verify(ver_opt, std::cout, std::cerr);
        }
        if (*sim) return gfsig::cmd_simulate(config_path, sim_out, std::cout, std::cerr);
        if (*a1) {
            a1_opt.families.clear();
            for (const auto& name : split(a1_families))
                a1_opt.families.push_back({gfsig::parse_family(name), a1_L, a1_p, a1_m, 0});
            return gfsig::cmd_a1(a1_opt, std::cout, std::cerr);
        }
        if (*bench) {
            std::ifstream f(bench_config);
            if (!f) {
                std::cerr << "bench: cannot open " << bench_config << "\n";
                return 2;
            }
            return gfsig::cmd_bench(gfsig::parse_config(f), std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
