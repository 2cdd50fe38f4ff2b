#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "conslaw/errors.hpp"
#include "conslaw/experiment.hpp"

namespace {

struct SubOptions {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = 1;
};

void add_common_options(CLI::App* sub, SubOptions& opts) {
    sub->add_option("--config", opts.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory (overrides run.out)");
    sub->add_option("--seed", opts.seed, "RNG seed for randomized grids (overrides run.seed)");
    sub->add_option("--threads", opts.threads,
                    "worker hint; execution stays serial for deterministic output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conservation-law experiment runner (" +
                 std::string(conslaw::kToolVersion) + ")"};
    app.require_subcommand(1);

    const char* kinds[] = {"degeneracy", "variation", "cheng", "wkb", "sweep", "oracle-check"};
    const char* blurbs[] = {
        "flux degeneracy report (order, base state, level-set exponent)",
        "oscillator fractional variation and series growth classification",
        "certified monotone-flow evolution with finite-volume comparison",
        "modulated-oscillation residual against the full equation",
        "fractional Sobolev seminorm scaling sweep",
        "dynamic-programming variation vs exhaustive oracle",
    };
    SubOptions opts[6];
    CLI::App* subs[6];
    for (int i = 0; i < 6; ++i) {
        subs[i] = app.add_subcommand(kinds[i], blurbs[i]);
        add_common_options(subs[i], opts[i]);
    }

    CLI11_PARSE(app, argc, argv);

    int which = -1;
    for (int i = 0; i < 6; ++i)
        if (subs[i]->parsed()) which = i;
    if (which < 0) return 2;  // unreachable: require_subcommand(1)

    try {
        auto cfg = conslaw::parse_config(opts[which].config_path,
                                         conslaw::kind_from_name(kinds[which]));
        if (!opts[which].out_dir.empty()) cfg.out_dir = opts[which].out_dir;
        if (opts[which].seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts[which].seed);

        const auto manifest = conslaw::run_experiment(cfg);
        std::fputs(conslaw::manifest_text(manifest, cfg).c_str(), stdout);
        return manifest.ok ? 0 : 1;
    } catch (const conslaw::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const conslaw::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
