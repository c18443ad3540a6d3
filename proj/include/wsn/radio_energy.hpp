#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>

namespace wsn {

// First-order radio energy model constants. Defaults are the reference
// scenario values (100-node network, 4000-bit data packets).
struct RadioParams {
    double e_elec = 50e-9;      // J/bit, transceiver circuitry
    double e_fs = 10e-12;       // J/bit/m^2, free-space amplifier
    double e_amp = 0.0013e-12;  // J/bit/m^4, multipath amplifier
    double e_da = 5e-9;         // J/bit, aggregation
    double b_data = 4000.0;     // bits per data packet
    double b_ctrl = 1000.0;     // bits per control packet

    // Compatibility switch: charge the CH uplink as the literal
    // (E_elec + E_DA)*B + E_tx reading, which double-counts E_elec*B.
    // Off by default; kept for sensitivity runs.
    bool literal_ch_tx = false;

    bool valid() const {
        return e_elec > 0 && e_fs > 0 && e_amp > 0 && e_da > 0 &&
               b_data > 0 && b_ctrl > 0;
    }

    void validate() const {
        if (!valid()) throw std::invalid_argument("RadioParams: all fields must be strictly positive");
    }
};

// Crossover distance between the free-space and multipath amplifier models.
inline double threshold_distance(const RadioParams& p) {
    return std::sqrt(p.e_fs / p.e_amp);
}

// Transmit cost for `bits` over distance d: d^2 amplifier below the
// threshold distance, d^4 above it.
inline double tx_energy(const RadioParams& p, double bits, double d) {
    if (d <= threshold_distance(p)) {
        return p.e_elec * bits + p.e_fs * bits * d * d;
    }
    return p.e_elec * bits + p.e_amp * bits * d * d * d * d;
}

inline double rx_energy(const RadioParams& p, double bits) {
    return p.e_elec * bits;
}

// CH receive cost over one round: circuitry cost for every member packet.
inline double ch_rx_energy(const RadioParams& p, std::span<const double> member_bits) {
    const double total = std::accumulate(member_bits.begin(), member_bits.end(), 0.0);
    return p.e_elec * total;
}

// CH uplink: aggregate `bits` and transmit them to the BS at distance d_bs.
inline double ch_tx_energy(const RadioParams& p, double bits, double d_bs) {
    if (bits == 0.0) return 0.0;
    if (p.literal_ch_tx) return (p.e_elec + p.e_da) * bits + tx_energy(p, bits, d_bs);
    return p.e_da * bits + tx_energy(p, bits, d_bs);
}

inline double control_rx_energy(const RadioParams& p) {
    return p.e_elec * p.b_ctrl;
}

}  // namespace wsn
