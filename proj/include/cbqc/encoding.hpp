// encoding.hpp
// Logical encoding of three-level atoms as qubits: |f> = 0 and the atom's
// basis-role partner level (e or g) = 1. Any population on the remaining
// level is an error.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "cbqc/state.hpp"

namespace cbqc {

// Rewrites every atom listed in `one_levels` as a logical qubit
// (f -> |0>, one_level -> |1>); other subsystems pass through unchanged.
inline StateVector atoms_to_qubits(const StateVector& state,
                                   const std::map<std::string, AtomLevel>& one_levels,
                                   double tol = kNormTol) {
    const auto& reg = state.reg();
    std::vector<SubsystemSpec> out_reg;
    std::vector<int> zero_digit(reg.size(), -1), one_digit(reg.size(), -1);
    for (std::size_t i = 0; i < reg.size(); ++i) {
        auto it = one_levels.find(reg[i].label);
        if (it == one_levels.end()) {
            out_reg.push_back(reg[i]);
            continue;
        }
        if (reg[i].kind != SubsystemKind::Atom) {
            throw invalid_input_error(reg[i].label + " is not an atom");
        }
        zero_digit[i] = static_cast<int>(AtomLevel::F);
        one_digit[i] = static_cast<int>(it->second);
        if (zero_digit[i] == one_digit[i]) {
            throw invalid_input_error("one level must differ from |f>");
        }
        out_reg.push_back(SubsystemSpec::qubit(reg[i].label));
    }

    std::size_t out_size = 1;
    for (const auto& s : out_reg) out_size *= static_cast<std::size_t>(s.dim);
    std::vector<Complex> out(out_size, Complex(0, 0));
    double residual = 0.0;
    std::vector<std::size_t> digits(reg.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        std::size_t rem = i;
        for (std::size_t k = reg.size(); k-- > 0;) {
            digits[k] = rem % static_cast<std::size_t>(reg[k].dim);
            rem /= static_cast<std::size_t>(reg[k].dim);
        }
        bool valid = true;
        std::size_t j = 0;
        for (std::size_t k = 0; k < reg.size(); ++k) {
            if (zero_digit[k] < 0) {
                j = j * static_cast<std::size_t>(reg[k].dim) + digits[k];
            } else if (digits[k] == static_cast<std::size_t>(zero_digit[k])) {
                j = j * 2;
            } else if (digits[k] == static_cast<std::size_t>(one_digit[k])) {
                j = j * 2 + 1;
            } else {
                valid = false;
                break;
            }
        }
        if (valid) {
            out[j] = state.amps()[i];
        } else {
            residual += std::norm(state.amps()[i]);
        }
    }
    if (residual > tol) {
        throw basis_undefined_error("amplitude outside logical level pairs");
    }
    StateVector res(std::move(out_reg), std::move(out));
    res.normalize();
    return res;
}

}  // namespace cbqc
