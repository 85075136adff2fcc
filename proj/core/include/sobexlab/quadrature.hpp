#pragma once

#include <vector>

namespace sobexlab::quadrature {

// Gauss-Legendre rule on [-1,1]; cached per order.
struct GLRule {
  std::vector<double> x, w;
};
const GLRule& gauss_legendre(int n);

struct Panel {
  double a, b;
};

// Geometric panel subdivision of [a,b]; panel widths shrink by `ratio`
// toward the flagged end(s).
std::vector<Panel> graded_panels(double a, double b, bool toward_a,
                                 bool toward_b, int panels, double ratio);

// Composite GL nodes/weights over the given panels.
void composite_rule(const std::vector<Panel>& panels, int nodes_per_panel,
                    std::vector<double>& xs, std::vector<double>& ws);

// Plain interval rule: two equal panels of GL(nodes).
void interval_rule(double a, double b, int nodes, std::vector<double>& xs,
                   std::vector<double>& ws);

}  // namespace sobexlab::quadrature
