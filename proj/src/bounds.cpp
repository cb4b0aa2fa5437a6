#include "meshsens/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace meshsens {

double unit_square_poincare_constant() { return 1.0 / (std::sqrt(2.0) * std::numbers::pi); }

void BoundInputs::validate() const
{
    if (!(a0 > 0)) throw std::invalid_argument("bound inputs: a0 must be positive");
    if (!(poincare > 0)) throw std::invalid_argument("bound inputs: Poincare constant must be positive");
    for (double v : {f_l2, coeff.a_sup, coeff.grad_a_sup, coeff.b_sup, coeff.grad_b_sup, coeff.c_sup, velocity_sup,
                     max_aspect, min_height})
        if (!(v >= 0)) throw std::invalid_argument("bound inputs: norms must be nonnegative");
    if (velocity_grad_sup && !(*velocity_grad_sup >= 0))
        throw std::invalid_argument("bound inputs: norms must be nonnegative");
}

BoundInputs make_bound_inputs(const SimplicialMesh& mesh, const Coefficients& coeffs, const VelocityNorms& velocity,
                              double poincare)
{
    const auto q = mesh_quality(mesh);
    BoundInputs in;
    in.dim = mesh.dim();
    in.poincare = poincare;
    in.a0 = coeffs.a0;
    in.f_l2 = l2_norm(mesh, coeffs.f);
    in.coeff = coeffs.norms;
    in.velocity_sup = velocity.sup;
    in.velocity_grad_sup = velocity.grad_sup;
    in.max_aspect = q.max_aspect;
    in.min_height = q.min_height;
    return in;
}

namespace {

double size_term(const BoundInputs& in)
{
    const double c = in.poincare;
    return in.f_l2 * (1 + c * in.coeff.grad_a_sup + c * c * in.coeff.grad_b_sup + 2 * c * c * in.coeff.c_sup) *
           in.velocity_sup;
}

double gradient_factor(const BoundInputs& in)
{
    const double c = in.poincare;
    return in.f_l2 * (3 * in.dim * c * in.coeff.a_sup + 2 * in.dim * c * c * in.coeff.b_sup);
}

}  // namespace

double smooth_bound(const BoundInputs& in)
{
    in.validate();
    if (!in.velocity_grad_sup) throw std::invalid_argument("smooth bound needs the velocity gradient norm");
    return (size_term(in) + gradient_factor(in) * *in.velocity_grad_sup * in.max_aspect) / in.a0;
}

double nonsmooth_bound(const BoundInputs& in)
{
    in.validate();
    if (!(in.min_height > 0)) throw std::invalid_argument("nonsmooth bound needs a positive minimum element height");
    return (size_term(in) + gradient_factor(in) * in.velocity_sup / in.min_height) / in.a0;
}

BoundReport verify_bounds(const SimplicialMesh& mesh, const BoundInputs& inputs, const FEFunction& u,
                          const FEFunction& udot)
{
    BoundReport r;
    r.inputs = inputs;
    r.measured = h1_seminorm(mesh, udot);
    if (inputs.velocity_grad_sup) {
        r.smooth_rhs = smooth_bound(inputs);
        r.smooth_satisfied = r.measured <= *r.smooth_rhs;
    }
    r.nonsmooth_rhs = nonsmooth_bound(inputs);
    r.nonsmooth_satisfied = r.measured <= r.nonsmooth_rhs;
    r.primal_seminorm = h1_seminorm(mesh, u);
    r.stability_satisfied = r.primal_seminorm <= inputs.poincare * inputs.f_l2 / inputs.a0;
    return r;
}

}  // namespace meshsens
