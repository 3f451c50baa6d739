"""Validation under the four recursive semantics.

A shape defined as the negation of itself cannot be totally assigned on any
non-empty graph, yet leaving its conformance undefined is perfectly
consistent: brave-partial accepts, brave-total rejects.  A recursive
vegetarian-menu document shows brave vs cautious disagreeing.
"""
import sclkit as sk

PRE = "@prefix : <http://ex/> .\n@prefix sh: <http://www.w3.org/ns/shacl#> .\n"

inconsistent = sk.document_from_graph(sk.parse_turtle(PRE + """
:InconsistentS a sh:NodeShape ; sh:not :InconsistentS .
"""))
g = sk.parse_turtle(PRE + ":a :p :b .")
print("self-negating shape on {(:a,:p,:b)}")
for mode in sk.SemanticsMode:
    print(f"  {mode.value:17} -> {sk.validate(g, inconsistent, mode)}")

veg = sk.document_from_graph(sk.parse_turtle(PRE + """
:VegDishShape a sh:PropertyShape ;
  sh:targetNode :DailySpecial ;
  sh:path :hasIngredient ;
  sh:minCount 1 ;
  sh:qualifiedMaxCount 0 ;
  sh:qualifiedValueShape [ sh:not :VegIngredientShape ] .
:VegIngredientShape a sh:PropertyShape ;
  sh:path [ sh:inversePath :hasIngredient ] ;
  sh:node :VegDishShape .
"""))
g1 = sk.parse_turtle(PRE + ":DailySpecial :hasIngredient :Chicken .")
print("\nvegetarian menu, is the chicken dish acceptable?")
for mode in sk.SemanticsMode:
    print(f"  {mode.value:17} -> {sk.validate(g1, veg, mode)}")

print("\nthe split document makes the partial answers total:")
gm = sk.gamma_transform(veg)
print(f"  brave-total on the split document -> "
      f"{sk.validate(g1, gm, sk.SemanticsMode.BRAVE_TOTAL)}")
