// Walks through the model I metric story at one momentum: spectrum, the
// spectral metric, the k-independent diagonal metric and the printed closed form.

#include <cstdio>

#include "pseudospec/metric.hpp"
#include "pseudospec/models.hpp"

using namespace pseudospec;

static void report(const char* label, const MetricReport& r) {
  std::printf("  %-9s relation %.3e  min_eig % .6f  %s\n", label, r.relation_residual, r.min_eig,
              std::string(to_string(r.verdict)).c_str());
}

int main() {
  const PhysParams pp;
  const Momentum2 k{1.0, 0.0};
  for (double lambda : {0.0, 0.5, 0.9}) {
    const RashbaCoupling rc{lambda};
    const CMatrix h = build_rashba(k, pp, rc);
    const auto e = rashba_energy(k, pp, rc);
    std::printf("lambda = %.2f  E = ±%.12f\n", lambda, e.plus.real());
    report("spectral", check_metric(h, spectral_metric(h)));
    report("diagonal", check_metric(h, eta_diag_rashba(pp, rc)));
    try {
      report("printed", check_metric(h, eta_paper_rashba(k, pp, rc)));
    } catch (const Error& err) {
      std::printf("  printed   %s\n", err.what());
    }
  }
}
