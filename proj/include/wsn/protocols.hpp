#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "wsn/clustering_opt.hpp"
#include "wsn/net_model.hpp"
#include "wsn/radio_energy.hpp"
#include "wsn/rng.hpp"

namespace wsn {

// A clustering decision for one round. An engaged solution with an empty CH
// set means "no cluster heads this round": every alive node goes direct-to-BS
// (reachable under LEACH when nobody self-elects).
class Protocol {
  public:
    virtual ~Protocol() = default;
    virtual std::string_view name() const = 0;
    // Centralized protocols pay control costs on every re-cluster event.
    virtual bool centralized() const = 0;
    virtual std::optional<ClusteringSolution> decide(const NetworkState& s) = 0;
};

// ---- LEACH (distributed stochastic baseline) ----

struct LeachEpochState {
    std::vector<bool> was_ch;  // indexed by node id - 1, reset every epoch
};

// Threshold self-election, T(n) = p / (1 - p * (r mod ceil(1/p))) for nodes
// not yet CH in the current epoch. Every alive node draws once per round so
// the stream advances identically regardless of eligibility.
std::vector<int> leach_elect(const NetworkState& s, double p_frac, Rng& rng,
                             LeachEpochState& epoch);

// Nearest-CH joining; ties to the lowest CH id. Empty CH set -> empty map.
std::map<int, int> leach_assign(const NetworkState& s, const std::vector<int>& chs);

class LeachProtocol final : public Protocol {
  public:
    LeachProtocol(double p_frac, std::uint64_t seed);
    std::string_view name() const override { return "leach"; }
    bool centralized() const override { return false; }
    std::optional<ClusteringSolution> decide(const NetworkState& s) override;

  private:
    double p_frac_;
    Rng rng_;
    LeachEpochState epoch_;
};

// ---- LEACH-C (centralized annealing baseline) ----

struct AnnealSchedule {
    int iterations = 1000;
    double initial_temp_divisor = 10.0;  // T0 = initial SSD / divisor
    double cooling = 0.99;               // geometric, per iteration
};

// Sum over alive non-CH nodes of the squared distance to the nearest CH.
double ssd(const NetworkState& s, const std::vector<int>& chs);

// Simulated annealing over k-subsets of the potential-head set; neighbor =
// swap one CH for one unused candidate. Returns the best-seen set with
// nearest-CH assignment; `objective` carries the SSD it optimized.
ClusteringSolution leach_c_cluster(const NetworkState& s, int k, Rng& rng,
                                   const AnnealSchedule& schedule);

class LeachCProtocol final : public Protocol {
  public:
    LeachCProtocol(double k_fraction, std::uint64_t seed, AnnealSchedule schedule = {});
    std::string_view name() const override { return "leach-c"; }
    bool centralized() const override { return true; }
    std::optional<ClusteringSolution> decide(const NetworkState& s) override;

  private:
    double k_fraction_;
    Rng rng_;
    AnnealSchedule schedule_;
};

// ---- MILP-backed protocol with a fixed re-cluster period ----
// Used by the weight sweep and for dataset generation; period 1 mirrors
// LEACH-C's every-round cadence with the exact solver behind it.
class MilpPeriodicProtocol final : public Protocol {
  public:
    MilpPeriodicProtocol(const RadioParams& p, MilpWeights w, double k_fraction,
                         long period = 1);
    std::string_view name() const override { return "milp-periodic"; }
    bool centralized() const override { return true; }
    std::optional<ClusteringSolution> decide(const NetworkState& s) override;

  private:
    RadioParams radio_;
    MilpWeights weights_;
    double k_fraction_;
    long period_;
    std::optional<ClusteringSolution> last_;
};

}  // namespace wsn
