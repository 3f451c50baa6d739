"""From shapes to logic and back, with a decidability verdict."""
import sclkit as sk

PRE = "@prefix : <http://ex/> .\n@prefix sh: <http://www.w3.org/ns/shacl#> .\n"
shapes = sk.document_from_graph(sk.parse_turtle(PRE + """
:studentShape a sh:NodeShape ;
  sh:targetClass :Student ;
  sh:not :disjFacultyShape .
:disjFacultyShape a sh:PropertyShape ;
  sh:path (:hasSupervisor :hasFaculty) ;
  sh:disjoint :hasFaculty .
"""))

phi = sk.tau(shapes)
print("the sentence:")
print(sk.pretty(phi, {"": "http://ex/"}))

verdict = sk.classify(phi)
print(f"\nfeatures: {verdict.features}")
print(f"verdict:  {verdict.decidability}, {verdict.complexity}, finite models: {verdict.fmp}")

back = sk.tau_inverse(phi)
print("\nround-tripped shapes:")
print(sk.serialize_turtle(sk.document_to_graph(back)))

print("prover encoding (first lines):")
print("\n".join(sk.emit_smtlib(phi).splitlines()[:6]) + "\n...")
