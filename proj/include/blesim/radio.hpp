#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blesim/core.hpp"

namespace blesim {

using NodeId = std::string;

inline constexpr int kChannelCount = 40;
inline constexpr int kDataChannelCount = 37;
inline constexpr std::array<int, 3> kAdvertisingChannels = {37, 38, 39};
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kMidBandHz = 2.44e9;

inline bool is_advertising_channel(int ch) { return ch >= 37 && ch <= 39; }
inline bool is_data_channel(int ch) { return ch >= 0 && ch < kDataChannelCount; }

// Center frequency in MHz. Data channels fill 2404-2424 and 2428-2478;
// advertising channels sit at 2402, 2426 and 2480 to maximize spectral
// spread, so the three frequency gaps in the data range belong to them.
inline double channel_center_mhz(int ch) {
    require(ch >= 0 && ch < kChannelCount, "channel-index: index outside 0-39");
    int position;
    if (ch == 37) position = 0;
    else if (ch == 38) position = 12;
    else if (ch == 39) position = 39;
    else position = (ch < 11) ? ch + 1 : ch + 2;
    return 2402.0 + 2.0 * position;
}

inline constexpr double kMinTxPowerDbm = -20.0;
inline constexpr double kMaxTxPowerDbm = 10.0;

struct TxParams {
    double tx_power_dbm = 0.0;
    int channel = 0;
};

inline void validate_tx_power(double dbm, const std::string& where) {
    if (dbm < kMinTxPowerDbm || dbm > kMaxTxPowerDbm)
        throw ScenarioError(where + ": tx power " + std::to_string(dbm) +
                            " dBm outside [-20, 10] dBm");
}

inline double friis_path_loss_db(double distance_m, double freq_hz = kMidBandHz) {
    distance_m = std::max(distance_m, 0.01);
    return 20.0 * std::log10(4.0 * M_PI * distance_m * freq_hz / kSpeedOfLight);
}

enum class Compartment { Same, Cross };

// Pairwise channel state between two radios. Shadowing redraws only at
// coherence-time boundaries (piecewise-constant fading); cross-compartment
// links must carry > 80 dB base loss.
struct RadioLink {
    NodeId node_a;
    NodeId node_b;
    double base_path_loss_db = 0.0;
    double shadowing_sigma_db = 0.0;
    SimTime coherence_time_us = 2'500'000;  // 2.5 s, the lower bound measured in cars
    Compartment compartment = Compartment::Same;
    double distance_m = 0.0;  // 0 = unknown; used only for propagation delay
};

struct InterferenceSource {
    std::string id;
    double center_mhz = 2440.0;
    double bandwidth_mhz = 20.0;
    double tx_power_dbm = 0.0;
    SimTime period_us = 0;  // 0 = always on
    double on_fraction = 1.0;
    double path_loss_db = 0.0;  // loss toward any receiver, unless overridden
    std::map<NodeId, double> path_loss_to;

    bool active_at(SimTime t) const {
        if (period_us == 0) return on_fraction > 0.0;
        const SimTime on_span = static_cast<SimTime>(on_fraction * static_cast<double>(period_us) + 0.5);
        return (t % period_us) < on_span;
    }

    double loss_toward(const NodeId& node) const {
        auto it = path_loss_to.find(node);
        return it != path_loss_to.end() ? it->second : path_loss_db;
    }

    // Fraction of this source's (flat-PSD) power that lands inside the 2 MHz
    // BLE channel centered at `bleCenterMhz`.
    double overlap_fraction(double ble_center_mhz) const {
        const double lo = std::max(center_mhz - bandwidth_mhz / 2.0, ble_center_mhz - 1.0);
        const double hi = std::min(center_mhz + bandwidth_mhz / 2.0, ble_center_mhz + 1.0);
        const double overlap = std::max(0.0, hi - lo);
        return bandwidth_mhz > 0.0 ? overlap / bandwidth_mhz : 0.0;
    }
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// SINR -> bit error rate. Default is the noncoherent binary FSK
// approximation 0.5*exp(-snr/2); a table of (sinr_db, ber) points replaces
// it when a measured curve is available (linear interpolation in dB).
struct BerCurve {
    std::vector<std::pair<double, double>> table;  // sorted by sinr_db

    double ber(double sinr_db) const {
        if (table.empty()) {
            const double snr_lin = std::pow(10.0, sinr_db / 10.0);
            return std::clamp(0.5 * std::exp(-snr_lin / 2.0), 0.0, 1.0);
        }
        if (sinr_db <= table.front().first) return table.front().second;
        if (sinr_db >= table.back().first) return table.back().second;
        for (std::size_t i = 1; i < table.size(); ++i) {
            if (sinr_db <= table[i].first) {
                const auto& [x0, y0] = table[i - 1];
                const auto& [x1, y1] = table[i];
                const double w = (sinr_db - x0) / (x1 - x0);
                return std::clamp(y0 + w * (y1 - y0), 0.0, 1.0);
            }
        }
        return table.back().second;
    }
};

struct ChannelConfig {
    double noise_floor_dbm = -100.0;  // thermal -111 dBm + 10 dB NF per 2 MHz, rounded
    double sensitivity_dbm = -90.0;
    double channel_correlation = 0.0;  // 0 = independent shadowing per channel
    double excess_loss_db = 0.0;       // added to Friis for position-derived links
    std::optional<double> uniform_loss_prob;  // per-packet corruption override
    BerCurve ber_curve;
};

enum class PacketOutcome { Delivered, Corrupted };

using LinkId = std::size_t;

// Intra-vehicle radio model: per-link path loss plus log-normal shadowing
// that is piecewise-constant per coherence interval and per channel
// (adjacent 2 MHz channels fade independently by default, consistent with a
// coherence bandwidth of a few MHz).
class ChannelModel {
public:
    explicit ChannelModel(ChannelConfig cfg = {}, std::uint64_t seed = 0)
        : cfg_(cfg), shadow_seed_(splitmix64(seed ^ 0x73686164'6f77ULL)) {}

    const ChannelConfig& config() const { return cfg_; }

    LinkId add_link(const RadioLink& link) {
        if (link.base_path_loss_db <= 0.0)
            throw ScenarioError("link " + link.node_a + "|" + link.node_b +
                                ": base path loss must be > 0 dB");
        if (link.compartment == Compartment::Cross && link.base_path_loss_db <= 80.0)
            throw ScenarioError("link " + link.node_a + "|" + link.node_b +
                                ": cross-compartment links require > 80 dB path loss");
        links_.push_back(link);
        const LinkId id = links_.size() - 1;
        by_pair_[pair_key(link.node_a, link.node_b)] = id;
        link_hash_.push_back(fnv1a64(pair_key(link.node_a, link.node_b)));
        dynamic_loss_.push_back(nullptr);
        return id;
    }

    LinkId link_between(const NodeId& a, const NodeId& b) const {
        auto it = by_pair_.find(pair_key(a, b));
        if (it == by_pair_.end())
            throw ScenarioError("unknown link " + a + "|" + b);
        return it->second;
    }

    bool has_link(const NodeId& a, const NodeId& b) const {
        return by_pair_.count(pair_key(a, b)) != 0;
    }

    const RadioLink& link(LinkId id) const { return links_.at(id); }

    // Mobility traces replace the static base loss with a function of time.
    void set_dynamic_loss(LinkId id, std::function<double(SimTime)> fn) {
        dynamic_loss_.at(id) = std::move(fn);
    }

    double path_loss_db(LinkId id, SimTime t) const {
        const auto& fn = dynamic_loss_.at(id);
        return fn ? fn(t) : links_[id].base_path_loss_db;
    }

    double shadowing_db(LinkId id, int channel, SimTime t) const {
        const RadioLink& l = links_.at(id);
        if (l.shadowing_sigma_db <= 0.0) return 0.0;
        const std::uint64_t interval = t / std::max<SimTime>(l.coherence_time_us, 1);
        const double rho = std::clamp(cfg_.channel_correlation, 0.0, 1.0);
        double z = 0.0;
        if (rho < 1.0)
            z += std::sqrt(1.0 - rho) * hashed_normal(draw_key(id, channel, interval));
        if (rho > 0.0)
            z += std::sqrt(rho) * hashed_normal(draw_key(id, -1, interval));
        return l.shadowing_sigma_db * z;
    }

    double rssi_dbm(LinkId id, const TxParams& tx, SimTime t) const {
        return tx.tx_power_dbm - path_loss_db(id, t) - shadowing_db(id, tx.channel, t);
    }

    void add_interferer(const InterferenceSource& src) {
        if (src.bandwidth_mhz <= 0.0)
            throw ScenarioError("interferer " + src.id + ": bandwidth must be > 0");
        if (src.on_fraction < 0.0 || src.on_fraction > 1.0)
            throw ScenarioError("interferer " + src.id + ": on-fraction outside [0,1]");
        interferers_.push_back(src);
    }

    const std::vector<InterferenceSource>& interferers() const { return interferers_; }

    // Interference power (mW) seen by `receiver` inside the BLE channel,
    // weighted by spectral overlap and the source's on/off state at t.
    double interference_mw(const NodeId& receiver, int channel, SimTime t) const {
        const double center = channel_center_mhz(channel);
        double sum = 0.0;
        for (const auto& src : interferers_) {
            if (!src.active_at(t)) continue;
            const double frac = src.overlap_fraction(center);
            if (frac <= 0.0) continue;
            sum += dbm_to_mw(src.tx_power_dbm - src.loss_toward(receiver)) * frac;
        }
        return sum;
    }

    double sinr_db(LinkId id, const NodeId& receiver, const TxParams& tx, SimTime t) const {
        const double signal = rssi_dbm(id, tx, t);
        const double denom = dbm_to_mw(cfg_.noise_floor_dbm) + interference_mw(receiver, tx.channel, t);
        return signal - mw_to_dbm(denom);
    }

    // Whole-packet delivery decision: every bit must survive at the per-bit
    // error rate for the current SINR, so P(delivered) = (1-ber)^bits.
    // Exactly one draw is consumed per decision regardless of outcome.
    PacketOutcome packet_outcome(LinkId id, const NodeId& receiver, const TxParams& tx,
                                 std::size_t packet_bits, SimTime t, RngStream& rng) const {
        require(packet_bits > 0, "packet-outcome: packet must carry at least one bit");
        double p_delivered;
        if (cfg_.uniform_loss_prob) {
            p_delivered = 1.0 - *cfg_.uniform_loss_prob;
        } else {
            const double ber = cfg_.ber_curve.ber(sinr_db(id, receiver, tx, t));
            p_delivered = std::pow(1.0 - ber, static_cast<double>(packet_bits));
        }
        return rng.uniform01() <= p_delivered ? PacketOutcome::Delivered
                                              : PacketOutcome::Corrupted;
    }

    double delivery_probability(LinkId id, const NodeId& receiver, const TxParams& tx,
                                std::size_t packet_bits, SimTime t) const {
        if (cfg_.uniform_loss_prob) return 1.0 - *cfg_.uniform_loss_prob;
        const double ber = cfg_.ber_curve.ber(sinr_db(id, receiver, tx, t));
        return std::pow(1.0 - ber, static_cast<double>(packet_bits));
    }

private:
    static std::string pair_key(const NodeId& a, const NodeId& b) {
        return a < b ? a + "|" + b : b + "|" + a;
    }

    std::uint64_t draw_key(LinkId id, int channel, std::uint64_t interval) const {
        std::uint64_t k = shadow_seed_ ^ link_hash_[id];
        k = splitmix64(k ^ static_cast<std::uint64_t>(channel + 2));
        return splitmix64(k ^ interval);
    }

    ChannelConfig cfg_;
    std::uint64_t shadow_seed_;
    std::vector<RadioLink> links_;
    std::vector<std::uint64_t> link_hash_;
    std::vector<std::function<double(SimTime)>> dynamic_loss_;
    std::map<std::string, LinkId> by_pair_;
    std::vector<InterferenceSource> interferers_;
};

}  // namespace blesim
