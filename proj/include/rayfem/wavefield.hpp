#pragma once

#include "rayfem/basis.hpp"
#include "rayfem/types.hpp"

#include <Eigen/Dense>
#include <iosfwd>

namespace rayfem {

// A discrete wave field: dof coefficients over a basis, evaluable anywhere on
// the mesh. P1 fields have piecewise-constant gradients; ray-enriched fields
// carry the plane-wave factors analytically in both value and gradient.
class WaveField {
  public:
    WaveField() = default;
    WaveField(BasisDescriptor basis, Eigen::VectorXcd dofs);

    const Mesh& mesh() const { return basis_.mesh(); }
    const BasisDescriptor& basis() const { return basis_; }
    const Eigen::VectorXcd& dofs() const { return dofs_; }

    cplx eval(double x, double z) const;
    GradC grad(double x, double z) const;

    // Value at mesh node j (only that node's basis functions contribute).
    cplx nodalValue(int node) const;
    Eigen::VectorXcd nodalValues() const;

    // Lines of "x z re im" for every node.
    void dump(std::ostream& os) const;

  private:
    BasisDescriptor basis_;
    Eigen::VectorXcd dofs_;
};

}  // namespace rayfem
