#pragma once

#include <memory>
#include <string>

#include "stancelab/policy.hpp"

namespace stancelab {

// Serves a local policy over a unix socket speaking line-delimited JSON, one
// request object per line. Ops: sample, logprob, sft, rl, snapshot,
// count_tokens, get_checkpoint, set_checkpoint. Requests are handled one
// connection at a time, which serializes updates as the policy contract
// requires.
class PolicyServer {
 public:
  PolicyServer(Policy& policy, std::string socket_path);
  ~PolicyServer();
  PolicyServer(const PolicyServer&) = delete;
  PolicyServer& operator=(const PolicyServer&) = delete;

  void start();
  void stop();
  const std::string& socket_path() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Client side of the same protocol; satisfies the full policy contract so
// trainers cannot tell a remote backend from a local one.
class RemotePolicy : public Policy {
 public:
  explicit RemotePolicy(std::string socket_path);
  ~RemotePolicy() override;

  std::vector<Completion> sample(const PromptSpec& prompt, int n, double temperature,
                                 std::uint64_t seed) override;
  double logprob(const PromptSpec& prompt, const Completion& completion,
                 double temperature, bool reference) override;
  double sft_update(const std::vector<SftExample>& batch, double lr) override;
  RlMetrics rl_update(const std::vector<RlExample>& batch,
                      const RlUpdateConfig& config) override;
  void snapshot_reference() override;
  int count_tokens(const std::string& text) const override;
  std::string checkpoint_json() const override;
  void load_checkpoint_json(const std::string& text) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stancelab
