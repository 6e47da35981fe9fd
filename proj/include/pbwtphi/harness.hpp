/*
   Copyright 2026 The pbwtphi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbwtphi/phi_index.hpp"

namespace pbwtphi {

struct PanelShape {
    std::size_t h = 0, m = 0, sigma = 0;
};

/// The sweep grid: h in {1,2,5,16,64}, m in {1,2,8,64,256}, sigma in {2,4,8}.
std::vector<PanelShape> campaign_grid();

/// Shape and seed of trial t; trial panels cycle through the grid.
PanelShape trial_shape(std::size_t trial);
std::uint64_t trial_seed(std::uint64_t campaign_seed, std::size_t trial);

struct CampaignConfig {
    std::uint64_t seed = 1;
    std::size_t panels = 200;
    std::size_t queries = 500;
    unsigned threads = 0; // 0 = worker_count()
    bool check_queries = true;
    bool check_decomposition = true;
    std::vector<std::uint32_t> ds = {2, 3, 5};
    Fault fault = Fault::none;
    bool split_threshold_mutation = false; // Active Split at d+1 instead of d
    bool stop_at_first_failure = false;
};

enum class FailureKind : std::uint8_t { query, decomposition, proposition };

std::string to_string(FailureKind kind);

struct Failure {
    FailureKind kind = FailureKind::query;
    std::size_t trial = 0;
    std::uint64_t panel_seed = 0;
    HaplotypePanel panel;
    Direction direction = Direction::pred;
    // query failures
    std::optional<Variant> variant;
    Site j = 0;
    Hap i = 0;
    std::uint64_t k = 0;
    std::vector<Hap> expected, got;
    // decomposition failures
    std::uint32_t d = 0;
    std::string message;
};

struct TrialResult {
    std::size_t trial = 0;
    std::uint64_t panel_seed = 0;
    PanelShape shape;
    std::uint64_t queries_checked = 0;
    std::uint64_t tables_checked = 0;
    std::uint64_t query_failures = 0;
    std::uint64_t decomposition_failures = 0;
    std::uint64_t proposition_failures = 0;
    std::optional<Failure> first_failure;
    bool skipped = false;
};

struct CampaignReport {
    std::vector<TrialResult> trials; // ordered by trial id
    double seconds = 0;
    unsigned threads = 1;

    [[nodiscard]] std::uint64_t count(FailureKind kind) const noexcept;
    [[nodiscard]] std::uint64_t queries_checked() const noexcept;
    [[nodiscard]] std::uint64_t tables_checked() const noexcept;
    [[nodiscard]] bool ok() const noexcept;
    /// Failure of the lowest-numbered failing trial.
    [[nodiscard]] const Failure* first_failure() const noexcept;
};

/// Worker count: hardware concurrency, capped by PBWTPHI_THREADS when set.
unsigned worker_count();

TrialResult run_trial(const CampaignConfig& cfg, std::size_t trial);
CampaignReport run_campaign(const CampaignConfig& cfg);

/// True if `f` still fails when re-run on its own panel (with updated query).
bool reproduces(const Failure& f, const CampaignConfig& cfg);

/// Greedily drops rows, columns and k while the failure reproduces.
Failure minimize(Failure f, const CampaignConfig& cfg);

struct BenchConfig {
    std::size_t h = 100;
    std::size_t m = 100000;
    std::size_t sigma = 2;
    std::uint64_t seed = 1;
    std::size_t queries = 20000;
    std::size_t repeats = 7;
    std::vector<std::uint64_t> ks = {1, 4, 16, 64};
};

struct BenchRow {
    Variant variant = Variant::v1;
    std::uint64_t k = 0;
    std::uint64_t steps = 0;         // phi steps per pass
    double median_ns = 0;            // per pass over all queries
    double ns_per_step = 0;
};

struct BenchReport {
    BenchConfig config;
    std::uint64_t r_tilde = 0;
    std::uint64_t intervals = 0;
    std::uint64_t alpha = 0;
    std::uint64_t bytes_v1 = 0, bytes_v2 = 0, bytes_baseline = 0; // serialized sizes
    double build_seconds = 0;
    std::vector<BenchRow> rows;

    [[nodiscard]] const BenchRow* row(Variant v, std::uint64_t k) const noexcept;
};

BenchReport run_bench(const BenchConfig& cfg);

} // namespace pbwtphi
