#pragma once

#include "golap/operation.hpp"
#include "golap/tm.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace golap {

class Dataset;

/// Operations skipped during a History replay, with the reason.
struct ReplayReport {
   std::vector<std::string> skipped;
};

/// DISPLAY, the core operators and the derived ones over one dataset.
/// Every operator is pure: it validates its preconditions against the
/// source table and returns a new table with the operation appended to the
/// history.
class Algebra {
   public:
   explicit Algebra(const Dataset& ds) : ds_(ds) {}

   const Dataset& dataset() const { return ds_; }

   TM display(const DisplaySpec& spec) const;
   TM apply(const TM& t, const Operation& op) const;

   // core
   TM drotate(const TM& t, const DrotateOp& op) const;
   TM drilldown(const TM& t, const DrilldownOp& op) const;
   TM rollup(const TM& t, const RollupOp& op) const;
   TM nest(const TM& t, const NestOp& op) const;
   TM select(const TM& t, const SelectOp& op) const;
   TM switch_values(const TM& t, const SwitchOp& op) const;
   TM agregate(const TM& t, const AgregateOp& op) const;
   TM unagregate(const TM& t, const UnagregateOp& op = {}) const;
   TM push(const TM& t, const PushOp& op) const;
   TM pull(const TM& t, const PullOp& op) const;
   TM addm(const TM& t, const AddmOp& op) const;
   TM delm(const TM& t, const DelmOp& op) const;

   // derived
   TM hrotate(const TM& t, const HrotateOp& op) const;
   TM plot(const TM& t, const PlotOp& op) const;
   TM order(const TM& t, const OrderOp& op) const;
   TM frotate(const TM& t, const FrotateOp& op, ReplayReport* report = nullptr) const;
   TM unselect(const TM& t, const UnselectOp& op = {}) const;

   /// Replays onto `target`, in order, every record of `source` that
   /// references `object`. Records whose preconditions fail are skipped and
   /// listed in `report`.
   TM history(const TM& source, std::string_view object, const TM& target, ReplayReport* report = nullptr) const;

   /// The predicate UNSELECT installs: F.All = 'all' and D.All = 'all' for
   /// every dimension linked to F.
   Predicate unrestricted(const std::string& fact) const;
   /// The DISPLAY a FROTATE starts from.
   DisplaySpec frotate_display(const TM& t, const FrotateOp& op) const;

   private:
   const Dataset& ds_;
};

} // namespace golap
