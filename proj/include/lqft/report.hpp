#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lqft {

// One line of a check report. status is "pass", "fail" or "info";
// checked/skipped count the tuples visited and the tuples whose data lay
// outside a finite fragment.
struct ReportEntry {
  std::string check;
  std::string target;
  std::string status;
  std::string witness;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

class Report {
 public:
  void pass(std::string check, std::string target, std::size_t checked = 0,
            std::size_t skipped = 0, std::string note = {}) {
    entries_.push_back({std::move(check), std::move(target), "pass", std::move(note), checked,
                        skipped});
  }
  void fail(std::string check, std::string target, std::string witness) {
    entries_.push_back({std::move(check), std::move(target), "fail", std::move(witness), 0, 0});
  }
  void info(std::string check, std::string target, std::string note) {
    entries_.push_back({std::move(check), std::move(target), "info", std::move(note), 0, 0});
  }
  // Records pass when no failure for this check was added since `mark`.
  void close(std::size_t mark, const std::string& check, const std::string& target,
             std::size_t checked, std::size_t skipped = 0) {
    for (std::size_t i = mark; i < entries_.size(); ++i)
      if (entries_[i].check == check && entries_[i].status == "fail") return;
    pass(check, target, checked, skipped);
  }
  void merge(const Report& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }

  bool ok() const {
    for (const auto& e : entries_)
      if (e.status == "fail") return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.status == "fail";
    return n;
  }
  bool failed(const std::string& check) const {
    for (const auto& e : entries_)
      if (e.status == "fail" && e.check == check) return true;
    return false;
  }
  std::size_t mark() const { return entries_.size(); }
  const std::vector<ReportEntry>& entries() const { return entries_; }

 private:
  std::vector<ReportEntry> entries_;
};

}  // namespace lqft
