#ifndef XIDPS_SAMPLE_GEN_HPP
#define XIDPS_SAMPLE_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "xidps/idps.hpp"
#include "xidps/schema.hpp"

namespace xidps {

// Seed-deterministic flow sample in the official UNSW-NB15 training-set
// layout: stratified class mix, class-conditional feature distributions,
// consistent binary labels.
struct SampleOptions {
    std::size_t rows = 28000;
    std::uint64_t seed = 7;
};

void write_unsw_sample(const std::string& path, const SampleOptions& opts);

// Round-robin conversion of table rows into per-source event feeds with
// strictly increasing logical timestamps.
std::vector<std::vector<FeedEvent>> feeds_from_table(const RawTable& table,
                                                     std::size_t max_events,
                                                     const std::vector<std::string>& sources);

}  // namespace xidps

#endif  // XIDPS_SAMPLE_GEN_HPP
