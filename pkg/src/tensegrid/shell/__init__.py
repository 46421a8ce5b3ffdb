from .document import DOC_VERSION, document_dict, load, save
from .svg import RenderStyle, render_svg
