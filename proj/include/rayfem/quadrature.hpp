#pragma once

#include "rayfem/types.hpp"

#include <vector>

namespace rayfem {

struct QuadRule {
    std::vector<Vec2> points;     // on the reference triangle (0,0),(1,0),(0,1)
    std::vector<double> weights;  // positive, summing to 1/2
};

// Quadrature rule exact for polynomials of total degree <= order, order in 1..12.
// Built from a Gauss-Legendre tensor rule under the Duffy map, so weights are
// positive at every order.
const QuadRule& reference_quadrature(int order);

struct EdgeQuadRule {
    std::vector<double> points;   // on [0, 1]
    std::vector<double> weights;  // summing to 1
};

// 1D rule exact for polynomials of degree <= order.
const EdgeQuadRule& edge_quadrature(int order);

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace rayfem
