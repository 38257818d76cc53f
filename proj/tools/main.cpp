#include <cstdint>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mfdirac/dynamics.hpp"
#include "mfdirac/quadrature.hpp"
#include "mfdirac/runner.hpp"

using namespace mfd;

int main(int argc, char** argv) {
    CLI::App app{"mean-field Dirac laboratory: solitary waves, spectra, and long-time dynamics"};
    app.require_subcommand(1);

    std::string configPath, outDir, engine;
    std::uint64_t seed = 0;
    bool quiet = false;
    bool corruptBeta = false;

    app.add_option("--config", configPath, "JSON experiment description");
    app.add_option("--out", outDir, "output directory (overrides the config)");
    app.add_option("--engine", engine, "evolution engine (overrides the config)")
        ->check(CLI::IsMember({"spectral", "volterra", "both"}));
    CLI::Option* seedOpt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_flag("--quiet", quiet, "suppress progress output");

    CLI::App* sub[5];
    sub[0] = app.add_subcommand("sigma", "spectral function curve and assumption report");
    sub[1] = app.add_subcommand("atlas", "solitary manifold atlas with residuals");
    sub[2] = app.add_subcommand("evolve", "time evolution (spectral, volterra, or both)");
    sub[3] = app.add_subcommand("attract", "long-run attraction study with distance tracking");
    sub[4] = app.add_subcommand("selftest", "invariant and oracle suite");
    for (CLI::App* s : sub) s->fallthrough();
    sub[4]->add_flag("--corrupt-beta", corruptBeta,
                     "sabotage the algebra to prove the checks can fail");

    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg =
            configPath.empty() ? RunConfig::defaults(name) : RunConfig::load(configPath);
        if (cfg.experiment.name.empty()) cfg.experiment.name = name;
        if (cfg.experiment.name != name)
            throw std::invalid_argument(
                fmt::format("config: experiment.name is '{}' but the '{}' command was invoked",
                            cfg.experiment.name, name));
        if (!outDir.empty()) cfg.outputDir = outDir;
        if (!engine.empty()) cfg.engine = engine;
        if (seedOpt->count() > 0) cfg.seed = seed;
        if (corruptBeta) cfg.experiment.corruptBeta = true;

        if (name == "sigma") cmd_sigma(cfg, quiet);
        else if (name == "atlas") cmd_atlas(cfg, quiet);
        else if (name == "evolve") cmd_evolve(cfg, quiet);
        else if (name == "attract") cmd_attract(cfg, quiet);
        else if (!cmd_selftest(cfg, quiet)) return 3;
        return 0;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 1;
    } catch (const NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return 2;
    } catch (const QuadratureError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
}
