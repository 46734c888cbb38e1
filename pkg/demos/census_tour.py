"""Walk the census across the strength ratio m and watch the count change at each bifurcation.

Run with: python demos/census_tour.py
"""
from fourvortex import census

B = census.bifurcation_values()
print(f"m*   = {B.m_star:.12f}   (positive-rate kites appear)")
print(f"m_eq = {B.m_eq:.12f}   (the minus rhombus stops rotating)")
print()

# one sample inside every regime, plus the special points where the census is still defined
samples = [1.0, 0.4, -0.2, -0.5, -0.55, -0.7, -0.9]
print(f"{'m':>6}  {'total':>5}  {'convex':>6}  {'concave':>7}  {'collinear':>9}  families")
for m in samples:
    row = census.full_census(m)
    fams = sorted({r.family for r in row.records})
    print(f"{m:>6}  {row.total:>5}  {row.subtotal('Convex'):>6}  {row.subtotal('Concave'):>7}  "
          f"{row.subtotal('Collinear'):>9}  {', '.join(fams)}")
    assert row.match, "census disagrees with the reference table"

# m = 0, m* and m_eq are refused: families merge or degenerate there
for name, m in [("0", 0.0), ("m*", B.m_star), ("m_eq", B.m_eq)]:
    try:
        census.full_census(m)
    except census.BoundaryEvent as exc:
        print(f"\nm = {name}: boundary event '{exc.name}'")
