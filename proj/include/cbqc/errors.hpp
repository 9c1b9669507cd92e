// errors.hpp
// Exception hierarchy shared by all cbqc components. Each maps to a stable
// CLI exit code (see tools/cbqc.cpp): validation 1, capacity 2, schema 3.

#pragma once

#include <stdexcept>
#include <string>

namespace cbqc {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments: unknown labels, out-of-range indices, register mismatches.
struct invalid_input_error : error {
    using error::error;
};

// A caller-supplied object violates its contract (e.g. non-unitary matrix).
struct contract_violation_error : error {
    using error::error;
};

// Requested system exceeds the brute-force envelope.
struct capacity_error : error {
    using error::error;
};

// Malformed or wrong-version file.
struct schema_error : error {
    using error::error;
};

// Amplitude would leave the cavity Fock truncation.
struct truncation_error : error {
    using error::error;
};

// State is outside the regime an operation supports (e.g. Fock n>1).
struct unsupported_regime_error : error {
    using error::error;
};

// Measurement requested on an atom with population outside its level pair.
struct basis_undefined_error : error {
    using error::error;
};

// Pattern placement / dependency problems.
struct placement_error : error {
    using error::error;
};
struct invalid_pattern_error : error {
    using error::error;
};

}  // namespace cbqc
