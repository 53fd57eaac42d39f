#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace nilfourier {

/// Resumable parallel map over lambda slots. Each slot's payload is written
/// to its own staging file (atomic rename), so an interrupted run resumes by
/// recomputing only the missing slots; final outputs are assembled from the
/// payloads in slot order and are byte-identical for any worker count or
/// interrupt pattern. A fingerprint mismatch (changed config) wipes the
/// staging area.
class SlotRunner {
 public:
  SlotRunner(std::filesystem::path staging_dir, std::uint64_t fingerprint, int total_slots);

  int total() const { return total_; }
  bool slot_done(int slot) const;
  int done_count() const;
  bool all_done() const { return done_count() == total_; }
  std::vector<int> pending() const;

  void store(int slot, const std::string& payload) const;
  std::string fetch(int slot) const;

  /// Computes up to max_new pending slots (all of them when max_new < 0) on
  /// `workers` threads. Returns the number of slots computed this call.
  int run(int workers, int max_new, const std::function<std::string(int)>& fn) const;

  /// Removes the staging directory (after final assembly).
  void clear() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path slot_path(int slot) const;

  std::filesystem::path dir_;
  std::uint64_t fingerprint_;
  int total_;
};

}  // namespace nilfourier
