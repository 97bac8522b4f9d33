#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "zklora/commands.hpp"

// Exit codes: 0 accept / success, 1 reject, 2 usage, 3 internal.
int main(int argc, char** argv) {
    CLI::App app{"zklora: verifiable LoRA fine-tuning at desk scale"};
    app.require_subcommand(1);
    std::string config, field, out, bundle;
    auto common = [&](CLI::App* c) {
        c->add_option("--config", config, "config file (key = value, [model] [quant] [run] [bench])")->required();
        c->add_option("--field", field, "big | test, overrides the config")->check(CLI::IsMember({"big", "test"}));
        c->add_option("--out", out, "artifact directory, overrides the config");
    };
    auto* setup = app.add_subcommand("setup", "generate key, tables and weights");
    auto* prove = app.add_subcommand("prove", "prove all epochs and write the bundle");
    auto* verify = app.add_subcommand("verify", "verify a bundle against the config");
    auto* bench = app.add_subcommand("bench", "time prove and verify for several sequence lengths");
    for (auto* c : {setup, prove, verify, bench}) common(c);
    verify->add_option("--bundle", bundle, "bundle path, default <out>/bundle.zklb");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        zkl::RunConfig rc = zkl::RunConfig::load(config, field);
        if (!out.empty()) rc.out = out;
        if (*setup) {
            for (const auto& f : zkl::cmd_setup(rc)) std::cout << "wrote " << rc.out << "/" << f << "\n";
            return 0;
        }
        if (*prove) {
            const auto r = zkl::cmd_prove(rc);
            for (std::size_t e = 0; e < r.timing.size(); ++e)
                std::cout << "epoch" << e << ".loss=" << r.losses[e] << " nats\n"
                          << "epoch" << e << ".prove_time=" << r.timing[e].prove_total() << " s\n";
            std::cout << "bundle=" << r.bundle_path << "\nbundle_size=" << r.bundle_bytes << " bytes\n";
            return 0;
        }
        if (*verify) {
            const auto rep = zkl::cmd_verify(rc, bundle.empty() ? rc.out + "/bundle.zklb" : bundle);
            zkl::print_report(std::cout, rep, rc.field == zkl::FieldMode::Big);
            return rep.accept ? 0 : 1;
        }
        if (*bench) {
            zkl::cmd_bench(rc, std::cout);
            return 0;
        }
    } catch (const zkl::ConfigInvalid& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
