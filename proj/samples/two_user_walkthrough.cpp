// Two users, two edge nodes: run the coded scheme and the reference schemes
// on the same inputs and print their loads and decode errors.

#include <algorithm>
#include <cstdio>
#include <utility>

#include "ucec/metrics.hpp"
#include "ucec/schemes.hpp"

int main() {
  ucec::SystemConfig cfg;
  cfg.users = 2;
  cfg.nodes = 2;
  cfg.outputs = 3;
  cfg.input_dim = 4;
  cfg.direction_n = 2;
  cfg.power = 1e6;

  ucec::Stream ds(1);
  const ucec::LinearFunctionFamily fam(ucec::generate_dataset(cfg, ds));

  std::printf("%-9s %-4s %-6s %-6s %-10s %-10s %s\n", "scheme", "F", "r", "L", "noiseless",
              "P=1e6", "worst cond");
  for (const char* tag : {"ucec", "zf-ready", "ain22", "tdma"}) {
    const std::size_t f = ucec::validate_scheme_config(tag, cfg);
    const auto run = [&](bool noiseless) {
      ucec::Stream in(2), ch(3), noise(4);
      const auto block = ucec::generate_inputs(cfg, f, in);
      const auto tr = ucec::scheme_by_tag(tag).run(cfg, fam, block, ch, noise, {noiseless});
      return std::make_pair(tr, ucec::max_relative_error(tr.decoded, ucec::ground_truth(fam, block)));
    };
    const auto [clean, clean_err] = run(true);
    const auto [noisy, noisy_err] = run(false);
    const auto loads = ucec::compute_loads(noisy);
    double cond = 0.0;
    for (double c : noisy.condition_numbers) cond = std::max(cond, c);
    std::printf("%-9s %-4zu %-6s %-6s %-10.3g %-10.3g %.3g\n", tag, f,
                ucec::to_string(loads.computation).c_str(),
                ucec::to_string(loads.communication).c_str(), clean_err, noisy_err, cond);
  }
  // The coded scheme's decoding matrix grows badly conditioned with N, so
  // its noisy error is dominated by the worst channel draw.
}
