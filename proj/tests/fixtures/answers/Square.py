import gdspy

MM = 1000  # gdspy user unit is 1 um
w = 10 * MM

lib = gdspy.GdsLibrary()
cell = lib.new_cell("SQUARE")
# lower right corner at the origin
square = gdspy.Rectangle((-w, 0), (0, w), layer=0)
cell.add(square)
lib.write_gds("square.gds")
