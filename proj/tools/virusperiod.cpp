#include <iostream>

#include "CLI11.hpp"
#include "virusperiod/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = virusperiod::cli;
    CLI::App app{"virusperiod: periodic solutions of the nonresident computer-virus model"};
    app.require_subcommand(1);

    cli::Options opt;
    for (const auto& name : cli::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
        sub->add_option("--out", opt.out_dir, "output directory for CSV/JSON files");
        sub->add_option("--d1-variant", opt.d1_variant, "derivation|literal");
        sub->add_option("--a-decay", opt.a_decay, "alpha2|alpha1");
        sub->add_option("--grid-n", opt.grid_n, "extrema grid density (>= 64)");
        sub->add_option("--multi-start", opt.multi_start, "extra shooting starts over the a priori box");
        if (name == "simulate") {
            sub->add_option("--y0", opt.y0, "initial state S,L,A")->delimiter(',');
            sub->add_option("--t1", opt.t1, "final time");
            sub->add_option("--system", opt.system, "original|transformed");
        }
        sub->callback([&opt, name] { opt.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kConfigError;
    }
    return cli::run(opt, std::cout, std::cerr);
}
