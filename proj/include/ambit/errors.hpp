#pragma once

#include <stdexcept>
#include <string>

namespace ambit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define AMBIT_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    explicit Name(const std::string& what)  \
        : Error(#Name ": " + what) {}       \
  };

// dram_model
AMBIT_DEFINE_ERROR(SenseFailure)
AMBIT_DEFINE_ERROR(InvalidActivate)
AMBIT_DEFINE_ERROR(WidthMismatch)
AMBIT_DEFINE_ERROR(CrossSubarray)
AMBIT_DEFINE_ERROR(SameBank)
// ambit_controller
AMBIT_DEFINE_ERROR(UnknownAddress)
AMBIT_DEFINE_ERROR(OperandPlacement)
AMBIT_DEFINE_ERROR(OutOfRange)
// timing_energy
AMBIT_DEFINE_ERROR(Infeasible)
// host_runtime
AMBIT_DEFINE_ERROR(CapacityExhausted)
AMBIT_DEFINE_ERROR(CorruptInput)
// workloads
AMBIT_DEFINE_ERROR(ConstantOutOfRange)
AMBIT_DEFINE_ERROR(ConfigError)

#undef AMBIT_DEFINE_ERROR

}  // namespace ambit
