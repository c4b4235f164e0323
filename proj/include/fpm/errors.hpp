// fpmul: bit-accurate model of an iterative x86 FP multiplier datapath
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fpm {

// A module precondition or interface property was violated by the caller.
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// A scheduler guard was violated when driving the unit.
struct GuardViolation : std::logic_error {
    explicit GuardViolation(const std::string& what) : std::logic_error(what) {}
};

} // namespace fpm
