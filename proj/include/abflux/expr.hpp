#pragma once

// Minimal expression grammar for gauge scalars chi(r, theta):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | primary
//   primary:= number | 'r' | 'theta' | 'sin' '(' expr ')' | 'cos' '(' expr ')'
//           | 'pow' '(' expr ',' number ')' | '(' expr ')'
// Gradients are evaluated exactly by forward-mode dual numbers.

#include <memory>
#include <string>

namespace abflux::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Parse an expression; throws InputError on malformed input.
NodePtr parse(const std::string& source);

double eval(const NodePtr& n, double r, double theta);

/// Value together with (d/dr, d/dtheta).
void eval_with_gradient(const NodePtr& n, double r, double theta, double* value,
                        double* d_r, double* d_theta);

}  // namespace abflux::expr
