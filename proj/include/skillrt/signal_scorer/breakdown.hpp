#pragma once

#include <array>
#include <map>
#include <string>

namespace skillrt {

// Fine sub-signal values keyed by canonical id (s1.tp ... s4.side_effect),
// the four coarse family scores, and the resulting step score.
struct SignalBreakdown {
    std::map<std::string, double> fine_values;
    std::array<double, 4> z{};  // timing, modality, correctness, outcome
    double a_step = 0.0;

    friend bool operator==(const SignalBreakdown&, const SignalBreakdown&) = default;
};

}  // namespace skillrt
