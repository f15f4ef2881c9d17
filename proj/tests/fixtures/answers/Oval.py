import gdspy

MM = 1000  # gdspy user unit is 1 um
major, minor = 20 * MM, 13 * MM

lib = gdspy.GdsLibrary()
cell = lib.new_cell("OVAL")
oval = gdspy.Round((0, 0), (major / 2, minor / 2), tolerance=1, layer=0)
cell.add(oval)
lib.write_gds("oval.gds")
