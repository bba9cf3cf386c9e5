#pragma once

#include <string_view>

#include "ninput/kernels.hpp"

namespace ninput {

/// Parses a kernel string:
///
///   name[:key=value,...]        catalog kernel, e.g. quad_a:a=0.5,shift=true
///   sum_lift(<kernel>,n)        lifts; nest freely
///   prod_lift(<kernel>,n)
///
/// A bare token after a key=value pair extends that value as a list, so
/// `prod_f_uvt:coeffs=0,1` gives coeffs = "0,1".
KernelSpec parse_kernel(std::string_view text);

}  // namespace ninput
