#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "msched/model.hpp"

namespace msched {

/// Convergent 121393/75025 of the golden ratio (error below 2e-10).
Rational default_phi();

/// 2k jobs with f = max(1/s, phi/2) in pairs sharing a group machine of speed
/// 2/phi, each with a dedicated machine of speed 2 - phi, plus one job with
/// f = max(1/s, 1) and unit speed on every group machine. Machines: k group
/// machines first, then the 2k dedicated ones; the extra job is last.
Instance gen_gap_unrelated(unsigned k, const Rational& phi = default_phi());

/// k jobs with f = max(2/s, 1); one dedicated machine per job (machines
/// 0..k-1) and a shared pool of k-1 machines, all unit speed where eligible.
Instance gen_gap_restricted(unsigned k);

/// 2k+1 jobs with f = max(2/s, 1) on 2k machines of speed 1 followed by k
/// machines of speed 2.
Instance gen_gap_uniform(unsigned k);

/// Largest p_max * n * m accepted by from_nonmalleable.
inline constexpr unsigned kMaxNonmalleableExponent = 64;

/// Non-malleable processing times p (machines x jobs, positive integers) as a
/// malleable instance with f_j({i}) = p(i, j). Throws BudgetExceeded when the
/// exponent p_max * n * m is above the cap.
Instance from_nonmalleable(const Matrix<int>& p);

enum class FnFamily { CappedInverse, Amdahl, PowerLaw };

std::string to_string(FnFamily f);
FnFamily parse_fn_family(std::string_view text);

struct RandomSpec {
  std::uint64_t seed = 0;
  std::size_t machines = 3;
  std::size_t jobs = 4;
  FnFamily family = FnFamily::CappedInverse;
  Variant variant = Variant::Unrelated;
  bool weights = false;
};

Instance gen_random(const RandomSpec& spec);

/// Rescales time per job so that every job needs at least 1 even on all
/// machines, as the weighted objective requires.
Instance with_unit_floor(const Instance& inst);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);
void save_instance(const std::string& path, const Instance& inst);
Instance load_instance(const std::string& path);

std::string schedule_to_json(const Schedule& s);
/// Missing completion times are derived from the instance.
Schedule schedule_from_json(std::string_view text, const Instance& inst);
Schedule load_schedule(const std::string& path, const Instance& inst);
void save_schedule(const std::string& path, const Schedule& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace msched
