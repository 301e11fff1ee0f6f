// Writes the shipped example groups into a directory (default data/groups):
// reflection groups of a (3,3,4) triangle and a (3,3,3,4) tetrahedral cycle,
// each at mu = 1 (preserving diag(1, ..., 1, -1)) and deformed at mu = 1.5.

#include "hlyap/domainbuild.hpp"
#include "hlyap/io.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

struct Example {
  std::string name;
  std::vector<std::vector<int>> coxeter;
  double mu;
};

// Largest |g^T J g - J| over the generators.
double form_defect(const hlyap::projlin::Group& g) {
  const int d = g.dim();
  hlyap::Matrix j = hlyap::Matrix::Identity(d, d);
  j(d - 1, d - 1) = -1.0;
  double worst = 0.0;
  for (int i = 0; i < g.rank(); ++i) {
    const auto& m = g.generator(i).matrix();
    worst = std::max(worst, (m.transpose() * j * m - j).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data/groups";
  const std::vector<std::vector<int>> triangle{{1, 3, 4}, {3, 1, 3}, {4, 3, 1}};
  const std::vector<std::vector<int>> tetra{{1, 3, 2, 4}, {3, 1, 3, 2}, {2, 3, 1, 3}, {4, 2, 3, 1}};
  const std::vector<Example> examples{{"so21_triangle_334", triangle, 1.0},
                                      {"deformed_triangle_334", triangle, 1.5},
                                      {"so31_tetra_3334", tetra, 1.0},
                                      {"deformed_tetra_3334", tetra, 1.5}};
  int status = 0;
  for (const auto& ex : examples) {
    const auto group = hlyap::domainbuild::reflection_group(ex.coxeter, ex.mu, ex.name);
    auto j = group.to_json();
    j["construction"] = {{"coxeter", ex.coxeter}, {"mu", ex.mu}, {"deformed_edge", {0, 1}}};
    const double defect = form_defect(group);
    std::cout << ex.name << ": |g^T J g - J| = " << defect << "\n";
    if (ex.mu == 1.0 && defect > 1e-12) {
      std::cerr << ex.name << " does not preserve the Lorentzian form\n";
      status = 1;
    }
    hlyap::io::write_json(dir + "/" + ex.name + ".json", j);
  }
  return status;
}
