#pragma once

#include <stdexcept>
#include <string>

namespace regrest {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define REGREST_DEFINE_ERROR(Name)                                             \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

// workspace
REGREST_DEFINE_ERROR(NotARepository);
REGREST_DEFINE_ERROR(UnknownRevision);
REGREST_DEFINE_ERROR(MergeCommit);
REGREST_DEFINE_ERROR(NoParent);
REGREST_DEFINE_ERROR(GitInvocationFailed);
REGREST_DEFINE_ERROR(CheckoutFailed);
REGREST_DEFINE_ERROR(BuildFailed);
REGREST_DEFINE_ERROR(MissingBinary);

// commit context
REGREST_DEFINE_ERROR(MalformedDiff);
REGREST_DEFINE_ERROR(BudgetUnsatisfiable);

// llm gateway
REGREST_DEFINE_ERROR(Timeout);
REGREST_DEFINE_ERROR(ProviderError);
REGREST_DEFINE_ERROR(ReplayMiss);
REGREST_DEFINE_ERROR(NoFencedBlock);
REGREST_DEFINE_ERROR(MissingInputSlots);
REGREST_DEFINE_ERROR(MissingCmd);

// execution
REGREST_DEFINE_ERROR(SpawnFailed);
REGREST_DEFINE_ERROR(SlotMismatch);
REGREST_DEFINE_ERROR(CoverageToolFailed);
REGREST_DEFINE_ERROR(NoCounters);

// seeds / reporting
REGREST_DEFINE_ERROR(EmptyCorpus);
REGREST_DEFINE_ERROR(EmptyInput);
REGREST_DEFINE_ERROR(ConfigError);
REGREST_DEFINE_ERROR(FatalEnvironment);

#undef REGREST_DEFINE_ERROR

} // namespace regrest
