# Package utils: jeux de paramètres de référence et accès aux configurations
