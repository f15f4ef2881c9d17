import math

import gdspy

MM = 1000  # gdspy user unit is 1 um
n = 3
side = 10 * MM
# circumradius from the edge length
r = side / (2 * math.sin(math.pi / n))
start = math.pi / 2
points = [(r * math.cos(start + 2 * math.pi * k / n), r * math.sin(start + 2 * math.pi * k / n)) for k in range(n)]

lib = gdspy.GdsLibrary()
cell = lib.new_cell("TRIANGLE")
cell.add(gdspy.Polygon(points, layer=0))
lib.write_gds("triangle.gds")
