#pragma once

#include <functional>
#include <vector>

#include "amemnet/tensor.hpp"

namespace amemnet {

// Central finite-difference oracle. `f` evaluates the scalar objective from
// the current contents of `params`; `analytic` holds the gradient under test,
// one tensor per parameter, shape-matched. Returns the max over all
// coordinates of |analytic - central| / max(1e-8, |analytic| + |central|).
// Parameters are restored before returning.
double finite_diff_check(const std::function<double()>& f,
                         const std::vector<Tensor*>& params,
                         const std::vector<Tensor>& analytic,
                         double eps = 1e-3);

}  // namespace amemnet
