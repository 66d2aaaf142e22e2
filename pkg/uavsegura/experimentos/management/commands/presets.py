from django.core.management.base import BaseCommand

from experimentos.barridos import PRESETS
from experimentos.configuracion import presets_disponibles


class Command(BaseCommand):
    help = "Lista las configuraciones y los barridos incluidos."

    def handle(self, *args, **options):
        self.stdout.write("Configuraciones:")
        for nombre in presets_disponibles():
            self.stdout.write(f"  {nombre}")
        self.stdout.write("Barridos:")
        for nombre, barrido in PRESETS.items():
            valores = ", ".join(f"{valor:g}" for valor in barrido.valores)
            self.stdout.write(f"  {nombre:<14} {barrido.parametro} = [{valores}]  {barrido.descripcion}")
