#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace golap {

/// Error kinds raised by every module. Names match the public contract so
/// callers (CLI, HTTP clients) can branch on them.
enum class ErrorCode {
   // schema
   SyntaxError,
   DuplicateName,
   InvalidIdentifier,
   HierarchyNotPath,
   UnknownAttributeInHierarchy,
   InvalidWeakAttribute,
   MissingHierarchy,
   MissingMeasure,
   EmptyConstellation,
   StarTargetMissing,
   FactWithFewerThanTwoDimensions,
   AttributeNotInHierarchy,
   // dataset
   MissingColumn,
   DanglingLink,
   DuplicateId,
   NonNumericMeasure,
   InvalidValue,
   UnknownAttribute,
   FileNotFound,
   // algebra
   UnknownConstellation,
   UnknownFact,
   UnknownDimension,
   MeasureNotInFact,
   DimensionNotStarred,
   SameDimensionBothAxes,
   HierarchyNotInDimension,
   DimensionNotOnAxis,
   AxisCollision,
   NotFinerLevel,
   NotCoarserLevel,
   AttributeNotDisplayed,
   UnknownNestedAttribute,
   AlreadyNested,
   UnknownQualifier,
   UnknownAttributeOrMeasure,
   TypeMismatchInComparison,
   ValueNotInDomain,
   IncompatibleAggregate,
   AlreadyPushed,
   MeasureNotInSubject,
   DuplicateMeasure,
   LastMeasure,
   FactDoesNotShareAxes,
   IncompatibleTarget,
   InvalidTable,
   // query language
   UnknownOperator,
   ArityError,
   ArgumentError,
   UnboundName,
   // service
   ServiceNotReady,
   UnknownSession,
   NothingToUndo,
};

std::string_view to_string(ErrorCode code);

/// Position of a fragment inside query-language source text.
struct SourceSpan {
   std::size_t begin = 0;   ///< byte offset, inclusive
   std::size_t end = 0;     ///< byte offset, exclusive
   std::size_t line = 1;
   std::size_t column = 1;

   bool operator==(const SourceSpan&) const = default;
};

class Error : public std::runtime_error {
   public:
   Error(ErrorCode code, const std::string& message);
   Error(ErrorCode code, const std::string& message, SourceSpan span);

   ErrorCode code() const { return code_; }
   const std::optional<SourceSpan>& span() const { return span_; }
   /// The message without the code prefix.
   const std::string& detail() const { return detail_; }

   private:
   ErrorCode code_;
   std::string detail_;
   std::optional<SourceSpan> span_;
};

} // namespace golap
