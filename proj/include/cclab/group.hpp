#pragma once
// Exact group algebra for the supported models: abelian box, abelian flat
// torus, and the first Heisenberg group in exponential coordinates.

#include <vector>

namespace cclab {

enum class Family { AbelianBox, AbelianTorus, Heisenberg1 };

/// A point is its coordinate vector; torus coordinates live in [0, period).
using Point = std::vector<double>;

struct GroupModel {
  Family family;
  int dimension;               // n
  int step;                    // kappa
  int homogeneous_dimension;   // Q
  std::vector<double> periods; // torus only, one period per axis

  static GroupModel abelian_box(int n);
  static GroupModel abelian_torus(std::vector<double> periods);
  static GroupModel heisenberg1();

  bool abelian() const { return family != Family::Heisenberg1; }
  const char* family_name() const;
};

/// Identity element (origin; all-zero coordinates).
Point identity(const GroupModel& m);

/// Group product a * b. Heisenberg: z picks up the area term (x1 y2 - y1 x2)/2.
Point multiply(const GroupModel& m, const Point& a, const Point& b);

/// Group inverse: coordinate negation (modular on the torus).
Point inverse(const GroupModel& m, const Point& a);

/// Anisotropic dilation: (lambda x, lambda y, lambda^2 z) on Heisenberg,
/// plain scaling on the abelian box. Undefined on the torus.
Point dilate(const GroupModel& m, double lambda, const Point& a);

/// Reduce coordinates into the fundamental domain (no-op off the torus).
Point reduce(const GroupModel& m, Point a);

/// Left-invariant horizontal frame evaluated at a, one coordinate vector per
/// horizontal direction. Heisenberg: X1 = (1,0,-y/2), X2 = (0,1,x/2).
/// Abelian: the standard basis.
std::vector<Point> horizontal_frame(const GroupModel& m, const Point& a);

/// Right-invariant horizontal frame: Xt1 = (1,0,y/2), Xt2 = (0,1,-x/2) on
/// Heisenberg, standard basis on abelian models.
std::vector<Point> right_frame(const GroupModel& m, const Point& a);

}  // namespace cclab
